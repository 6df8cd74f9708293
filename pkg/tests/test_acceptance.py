"""Acceptance suite: one test (or test group) per criterion.

Each criterion records a PASS/FAIL line that is printed in the terminal
summary (and immediately, with ``-s``).
"""

from __future__ import annotations

import json
import random
import time

import pytest

from clawham.cli import EXIT_OK, main
from clawham.driver import RunParams, initial_cycle, run
from clawham.finite import (exhaustive_summary, extension_agreement, graph_from_code, sample_admitted)
from clawham.forbidden import find_paw_via_ray, validate_paw
from clawham.graph import bfs_distances, neighborhood, shortest_cycle_through
from clawham.separators import (check_separator_facts, distance_increasing_ray, umbrella_from_parts,
                                umbrella_problems)

from conftest import ACCEPTANCE, INSTANCES, STAGES, extension_walk, instance

SIZES = (4, 5, 6, 7)
SAMPLE = {8: (334, 8008), 9: (333, 9009), 10: (333, 10010)}  # n: (count, seed)
T3_BUDGET = 60.0


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="module")
def exhaustive():
    return {n: exhaustive_summary(n) for n in SIZES}


def test_criterion_1_paw_free_graphs(exhaustive):
    bad_h = sum(len(s["counterexamples"]["paw_free_not_hamiltonian"]) for s in exhaustive.values())
    other = sum(s["classes"]["OTHER"] for s in exhaustive.values())
    counts = {n: s["paw_free"] for n, s in exhaustive.items()}
    ok = bad_h == 0 and other == 0 and all(counts.values())
    record(1, ok, f"paw-free 2-connected claw-free graphs per n {counts}; non-Hamiltonian {bad_h}, OTHER {other}")
    assert ok


def test_criterion_2_pancyclic_or_cycle(exhaustive):
    bad = sum(len(s["counterexamples"]["not_pancyclic_nor_cycle"]) for s in exhaustive.values())
    counts = {n: len(s["admitted"]) for n, s in exhaustive.items()}
    ok = bad == 0 and all(counts.values())
    record(2, ok, f"admitted graphs per n {counts}; counterexamples {bad}")
    assert ok


def test_criterion_3_extension_engine_agrees(exhaustive):
    total = 0
    failures = []
    for n in SIZES:
        rep = extension_agreement(graph_from_code(n, c) for c in exhaustive[n]["admitted"])
        total += rep["checked"]
        failures += rep["failures"]
    sampled = 0
    for n, (count, seed) in SAMPLE.items():
        rep = extension_agreement(graph_from_code(n, c) for c in sample_admitted(n, count, seed))
        sampled += rep["checked"]
        failures += rep["failures"]
    ok = not failures and sampled == 1000
    record(3, ok, f"{total} exhaustive + {sampled} sampled (n=8..10) admitted graphs, {len(failures)} failures")
    assert ok, failures[:3]


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_criterion_4_stages_verify(runs, name):
    tr = runs.get(name)
    stages = tr["stages"]
    assert tr["status"] == "ok" and len(stages) == STAGES[name] + 1
    for st in stages:
        assert st["verification"]["ok"], {k: v for k, v in st["verification"]["checks"].items() if not v["ok"]}
    ends = tr["ends"]
    need = 4 if name == "S4" else 3
    assert len(ends["anchors"]) >= need
    if name == "T3":
        assert ends["strictly_increasing"] and len(ends["descriptor_counts"]) >= 2


@pytest.mark.xfail(strict=True, reason="four stages of the regular-tree instance need ~5M cycle vertices, "
                                       "beyond the time and memory envelope")
def test_criterion_4_regular_tree_four_stages(runs):
    small = {n: runs.get(n) for n in INSTANCES}
    summary = "; ".join(f"{n} {len(t['stages']) - 1} stages ok" for n, t in small.items()
                        if t["status"] == "ok" and all(s["verification"]["ok"] for s in t["stages"]))
    start = time.monotonic()
    tr = run(instance("T3"), 4, RunParams(time_budget=T3_BUDGET))
    took = time.monotonic() - start
    done = len(tr["stages"]) - 1
    ok = tr["status"] == "ok" and done == 4
    record(4, ok, f"{summary}; T3 at 4 stages: status {tr['status']} after {done} stages in {took:.0f}s "
                  f"(budget {T3_BUDGET:.0f}s)")
    assert ok


def test_criterion_5_extension_properties():
    rng = random.Random(20240501)
    calls = 0
    failures = []
    kinds: dict = {}
    for n in range(6, 12):
        for code in sample_admitted(n, 200, seed=500 + n):
            g = graph_from_code(n, code)
            start = shortest_cycle_through(g, rng.choice(g.vertices))
            out = extension_walk(g, start, rng, n)
            calls += out["calls"]
            failures += out["failures"]
            for k, v in out["kinds"].items():
                kinds[k] = kinds.get(k, 0) + v
            if out["length"] != n and not out["failures"]:
                failures.append({"graph": code, "n": n, "error": "walk stopped short"})
    for name in sorted(INSTANCES):
        o = instance(name)
        c0 = initial_cycle(o)
        region = set(neighborhood(o, c0.vertices, 10))
        for _ in range(15):
            out = extension_walk(o, c0, rng, 100, region)
            calls += out["calls"]
            failures += out["failures"]
            for k, v in out["kinds"].items():
                kinds[k] = kinds.get(k, 0) + v
    ok = calls >= 10_000 and not failures
    record(5, ok, f"{calls} extension calls {dict(sorted(kinds.items()))}, {len(failures)} failures")
    assert ok, failures[:3]


def test_criterion_6_umbrella_structure(runs):
    checked = 0
    problems = []
    for name in sorted(INSTANCES):
        tr = runs.get(name)
        o = instance(name)
        for i, st in enumerate(tr["stages"][1:], start=1):
            checks = st["verification"]["checks"]
            if not checks["umbrella"]["ok"]:
                problems.append((name, i, checks["umbrella"]["failures"]))
            checked += 1
            if name == "T3":
                continue  # 640 parts: the stage verifier already ran these checks
            prev = tr["stages"][i - 1]["cycle"]
            u = umbrella_from_parts(o, prev, [(p["S"], p["anchor"]) for p in st["parts"]])
            rep = check_separator_facts(o, u, 0)
            bad = umbrella_problems(o, u)
            if bad or not rep["ok"]:
                problems.append((name, i, bad or rep))
    ok = not problems and checked == sum(STAGES.values())
    record(6, ok, f"{checked} umbrellas checked, {len(problems)} with problems")
    assert ok, problems[:2]


def test_criterion_7_paw_via_ray():
    results = {}
    for name in sorted(INSTANCES):
        o = instance(name)
        c = initial_cycle(o)
        paw, _ = find_paw_via_ray(o, c)
        validate_paw(o, paw)
        ray = distance_increasing_ray(o, c.vertices, 8)
        dist = bfs_distances(o, c.vertices, 9)
        layers = [sum(1 for v in ray if dist.get(v) == i) for i in range(9)]
        path = all(b in o.neighbors(a) for a, b in zip(ray, ray[1:]))
        results[name] = layers == [1] * 9 and path
    ok = all(results.values())
    record(7, ok, f"validated paw and one ray vertex per layer 0..8: {results}")
    assert ok


def test_criterion_8_reproducible(tmp_path, capsys):
    same = {}
    verified = {}
    for name in sorted(INSTANCES):
        spec = tmp_path / f"{name}.json"
        spec.write_text(json.dumps(INSTANCES[name]))
        outs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}.json"
            assert main(["run", "--spec", str(spec), "--stages", str(STAGES[name]), "--out", str(out)]) == EXIT_OK
            outs.append(out.read_bytes())
        same[name] = outs[0] == outs[1]
        verified[name] = main(["verify", "--trace", str(tmp_path / f"{name}-0.json")]) == EXIT_OK
        capsys.readouterr()
    ok = all(same.values()) and all(verified.values())
    record(8, ok, f"byte-identical reruns {same}; verify exit 0 {verified}")
    assert ok


def test_every_criterion_reported():
    assert sorted(ACCEPTANCE) == list(range(1, 9))
