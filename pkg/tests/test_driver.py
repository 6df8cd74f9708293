from __future__ import annotations

import copy
import json

import pytest

from clawham.driver import (RunParams, bootstrap, dumps_trace, initial_cycle, run, verify_stage, verify_trace)
from clawham.errors import HypothesisViolation, InputError, ResourceCapExceeded
from clawham.graph import bfs_distances, validate_cycle
from clawham.oracle import build_oracle, finite_as_oracle

from conftest import cycle_graph, instance, lollipop_instance


def test_initial_cycle():
    o = instance("S3")
    c = initial_cycle(o)
    assert len(c) == 3 and validate_cycle(o, c)[0]
    assert len({v.rpartition("#")[0] for v in c}) <= 2
    g = cycle_graph(5)
    assert initial_cycle(finite_as_oracle(g)).vertex_set() == set(g.vertices)
    with pytest.raises(HypothesisViolation) as err:
        initial_cycle(build_oracle({"base": {"kind": "T", "n": 3}, "transforms": []}))
    assert err.value.kind == "no_cycle"


def test_bootstrap_covers_three_neighbourhood():
    o = instance("S3")
    a = initial_cycle(o)
    c, steps = bootstrap(o, a)
    assert set(bfs_distances(o, a.vertices, 3)) <= c.vertex_set()
    assert validate_cycle(o, c)[0] and len(steps) == len(c) - len(a)
    again, more = bootstrap(o, c)
    assert more == [] or set(bfs_distances(o, c.vertices, 3)) <= again.vertex_set()


def test_stage_zero():
    tr = run(instance("S3"), 0)
    assert tr["status"] == "ok" and len(tr["stages"]) == 1
    assert tr["stages"][0]["umbrella"] is None and tr["stages"][0]["verification"]["ok"]
    assert verify_stage(tr, 0)["ok"]


def test_run_errors():
    with pytest.raises(HypothesisViolation):
        run(build_oracle({"base": {"kind": "S", "n": 3}, "transforms": []}), 1)
    with pytest.raises(ResourceCapExceeded):
        run(instance("S3"), 1, RunParams(cap=3))
    with pytest.raises(InputError):
        run(instance("S3"), -1)
    with pytest.raises(InputError):
        run(finite_as_oracle(cycle_graph(5)), 1)


@pytest.mark.parametrize("name", ["S3", "S4", "D3"])
def test_four_stages_verify(runs, name):
    tr = runs.get(name, 4)
    assert tr["status"] == "ok" and len(tr["stages"]) == 5
    for st in tr["stages"]:
        assert st["verification"]["ok"], st["verification"]["checks"]
    assert verify_trace(json.loads(dumps_trace(tr)))["ok"]


def test_star_stage_shape(runs):
    tr = runs.get("S4", 4)
    assert [st["verification"].get("k") for st in tr["stages"][1:]] == [4, 4, 4, 4]
    lengths = [len(st["cycle"]) for st in tr["stages"]]
    assert all(a < b for a, b in zip(lengths, lengths[1:]))


def test_regular_tree_blocker_grows(runs):
    tr = runs.get("T3", 2)
    ks = [st["verification"]["k"] for st in tr["stages"][1:]]
    assert tr["status"] == "ok" and ks == [40, 640]


def test_single_part_run():
    o = lollipop_instance()
    tr = run(o, 3)
    assert tr["status"] == "ok"
    assert [st["verification"]["k"] for st in tr["stages"][1:]] == [1, 1, 1]
    assert verify_trace(json.loads(dumps_trace(tr)), o)["ok"]


def failing_checks(report) -> set:
    return {name for name, c in report["checks"].items() if not c["ok"]}


def test_tampered_traces_are_flagged(runs):
    base = json.loads(dumps_trace(runs.get("S3", 4)))
    # drop one cycle edge: cut the stage-2 cycle open at a vertex and close
    # it again around the gap
    t1 = copy.deepcopy(base)
    cyc = t1["stages"][2]["cycle"]
    del cyc[len(cyc) // 2]
    bad = failing_checks(verify_stage(t1, 2))
    assert bad & {"cycle", "edge_stability", "cuts"}
    # a cycle edge swapped for a different route in stage 3
    t2 = copy.deepcopy(base)
    cyc = t2["stages"][3]["cycle"]
    cyc[1], cyc[2] = cyc[2], cyc[1]
    assert not verify_stage(t2, 3)["ok"]
    # a recorded crossing set that disagrees with the cycle
    t3 = copy.deepcopy(base)
    t3["stages"][2]["parts"][0]["crossing"] = t3["stages"][2]["parts"][0]["crossing"][:1]
    assert "cuts" in failing_checks(verify_stage(t3, 2))
    # a blocker vertex moved between parts
    t4 = copy.deepcopy(base)
    parts = t4["stages"][1]["parts"]
    parts[1]["S"].append(parts[0]["S"].pop())
    assert "umbrella" in failing_checks(verify_stage(t4, 1))
    assert not verify_trace(t1)["ok"]


def test_run_is_deterministic():
    a = dumps_trace(run(instance("D3"), 2))
    b = dumps_trace(run(instance("D3"), 2))
    assert a == b


def test_time_budget_stops_with_cap_status():
    tr = run(instance("T3"), 4, RunParams(time_budget=0.01))
    assert tr["status"] == "cap" and tr["error"]["type"] == "ResourceCapExceeded"
    assert all(st["verification"]["ok"] for st in tr["stages"])
