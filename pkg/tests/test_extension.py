from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clawham.driver import initial_cycle
from clawham.errors import HypothesisViolation, InputError
from clawham.extension import (PRED, SUCC, TYPE1, TYPE2_1, TYPE2_2, ExtensionRecord, WorkingCycle, apply_extension,
                               apply_record, extension_problems, find_extension)
from clawham.finite import graph_from_code, sample_admitted
from clawham.graph import OrientedCycle, neighborhood, shortest_cycle_through, validate_cycle

from conftest import INSTANCES, extension_walk, graph, instance


def test_type1():
    g = graph([("a", "b"), ("b", "d"), ("d", "e"), ("e", "a"), ("v", "a"), ("v", "b")])
    c = OrientedCycle(["a", "b", "d", "e"])
    rec = find_extension(g, c, "v")
    assert (rec.kind, rec.base, rec.foundation) == (TYPE1, "a", ("a", "b"))
    out = apply_extension(c, rec)
    assert out.vertices == ("a", "v", "b", "d", "e")
    assert extension_problems(g, c, out, rec) == []


def test_type1_on_c4():
    g = graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("v", "a"), ("v", "b")])
    c = OrientedCycle(["a", "b", "c", "d"])
    assert apply_extension(c, find_extension(g, c, "v")).vertices == ("a", "v", "b", "c", "d")


PAW_EDGES = [("a0", "a1"), ("a0", "b1"), ("a0", "b2"), ("b1", "b2")]


def test_type2_1():
    g = graph(PAW_EDGES + [("b2", "y"), ("y", "b1"), ("z", "a1"), ("z", "b1")])
    c = OrientedCycle(["b1", "a0", "b2", "y"])
    rec = find_extension(g, c, "a1")
    assert (rec.kind, rec.base, rec.far, rec.w) == (TYPE2_1, "a0", "b1", "z")
    out = apply_extension(c, rec)
    assert validate_cycle(g, out)[0] and set(out.vertices) == set(g.vertices)
    assert extension_problems(g, c, out, rec) == []


def test_type2_2():
    g = graph(PAW_EDGES + [("b2", "q"), ("q", "z"), ("z", "y"), ("y", "b1"), ("q", "y"),
                           ("z", "a1"), ("z", "b1")])
    c = OrientedCycle(["a0", "b2", "q", "z", "y", "b1"])
    rec = find_extension(g, c, "a1")
    assert (rec.kind, rec.base, rec.far, rec.w) == (TYPE2_2, "a0", "b1", "z")
    assert (rec.w_prev, rec.w_next) == ("q", "y") and rec.side == PRED
    out = apply_extension(c, rec)
    assert validate_cycle(g, out)[0] and len(out) == 7
    assert extension_problems(g, c, out, rec) == []


def test_hypothesis_errors():
    star = graph([("c", "x"), ("c", "y"), ("c", "v"), ("x", "p"), ("p", "y")])
    with pytest.raises(HypothesisViolation) as err:
        find_extension(star, OrientedCycle(["c", "x", "p", "y"]), "v")
    assert err.value.kind == "claw"
    paw = graph(PAW_EDGES)
    with pytest.raises(HypothesisViolation) as err:
        find_extension(paw, OrientedCycle(["b1", "a0", "b2"]), "a1")
    assert err.value.kind == "phi"
    with pytest.raises(InputError):
        find_extension(paw, OrientedCycle(["b1", "a0", "b2"]), "a0")


def test_record_roundtrip_and_mismatch():
    rec = ExtensionRecord(TYPE2_2, "v", "u", "x", SUCC, "w", "p", "q")
    assert ExtensionRecord.from_json(rec.to_json()) == rec
    wc = WorkingCycle(["a", "b", "c"])
    with pytest.raises(InputError):
        apply_record(wc, ExtensionRecord(TYPE1, "v", "a", "c", SUCC))


@st.composite
def admitted_graph(draw):
    n = draw(st.integers(5, 9))
    seed = draw(st.integers(0, 10_000))
    return graph_from_code(n, sample_admitted(n, 1, seed)[0])


@settings(max_examples=60, deadline=None)
@given(admitted_graph(), st.integers(0, 2**32 - 1))
def test_random_extensions_on_admitted_graphs(g, seed):
    rng = random.Random(seed)
    start = shortest_cycle_through(g, rng.choice(g.vertices))
    out = extension_walk(g, start, rng, len(g))
    assert out["failures"] == []
    assert out["length"] == len(g)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(sorted(INSTANCES)), st.integers(0, 2**32 - 1))
def test_random_extensions_on_infinite_instances(name, seed):
    o = instance(name)
    rng = random.Random(seed)
    start = initial_cycle(o)
    region = set(neighborhood(o, start.vertices, 4))
    out = extension_walk(o, start, rng, 40, region)
    assert out["failures"] == [] and out["calls"] > 0
