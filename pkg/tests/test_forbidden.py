from __future__ import annotations

from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clawham.errors import InputError, PreconditionError
from clawham.finite import graph_from_code
from clawham.forbidden import (PawWitness, check_phi, check_preconditions, enumerate_induced_paws, find_claw,
                               find_paw_via_ray, validate_paw)
from clawham.graph import OrientedCycle, neighborhood
from clawham.oracle import ball, build_oracle, finite_as_oracle

from conftest import INSTANCES, complete, cycle_graph, graph, instance

CLAW = nx.star_graph(3)
PAW = nx.Graph([(0, 1), (0, 2), (0, 3), (2, 3)])
PAW_G = graph([("a0", "a1"), ("a0", "b1"), ("a0", "b2"), ("b1", "b2")])


def brute_claws(g):
    """Centres of induced claws by checking every 4-set against K_{1,3}."""
    h = nx.Graph(g.edges())
    h.add_nodes_from(g.vertices)
    centres = set()
    for quad in combinations(g.vertices, 4):
        sub = h.subgraph(quad)
        if nx.is_isomorphic(sub, CLAW):
            centres.add(max(sub.degree, key=lambda t: t[1])[0])
    return centres


def brute_paws(g):
    """Induced paws as (degree-3 vertex, pendant, {triangle pair}) by 4-sets."""
    h = nx.Graph(g.edges())
    h.add_nodes_from(g.vertices)
    out = set()
    for quad in combinations(g.vertices, 4):
        sub = h.subgraph(quad)
        if nx.is_isomorphic(sub, PAW):
            deg = dict(sub.degree)
            a0 = next(v for v in quad if deg[v] == 3)
            a1 = next(v for v in quad if deg[v] == 1)
            out.add((a0, a1, frozenset(v for v in quad if deg[v] == 2)))
    return out


@st.composite
def small_graphs(draw):
    n = draw(st.integers(4, 8))
    return graph_from_code(n, draw(st.integers(0, (1 << (n * (n - 1) // 2)) - 1)))


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_claws_and_paws_match_four_set_enumeration(g):
    centres = brute_claws(g)
    w = find_claw(g)
    assert (w is None) == (not centres)
    if w is not None:
        assert w.center in centres
    got = {(p.a0, p.a1, frozenset((p.b1, p.b2))) for p in enumerate_induced_paws(g)}
    assert got == brute_paws(g)


@settings(max_examples=100, deadline=None)
@given(small_graphs())
def test_phi_witness_is_canonical(g):
    for p in enumerate_induced_paws(g):
        z = check_phi(g, p)
        outside = set(g.vertices) - set(p.vertices())
        cands = sorted(x for x in outside if g.has_edge(x, p.a1) and g.has_edge(x, p.b1))
        if not cands:
            cands = sorted(x for x in outside if g.has_edge(x, p.a1) and g.has_edge(x, p.b2))
        assert z == (cands[0] if cands else None)


def test_claw_examples():
    star = graph([("c", "x"), ("c", "y"), ("c", "z")])
    w = find_claw(star, {"c"})
    assert w is not None and w.center == "c" and w.leaves == ("x", "y", "z")
    assert find_claw(cycle_graph(6)) is None
    o = instance("S3")
    b = ball(o, o.roots, 4)
    interior = sorted(neighborhood(o, o.roots, 3))
    assert find_claw(b, interior, host=o) is None
    with pytest.raises(PreconditionError):
        find_claw(b, sorted(b.vertices), host=o)


def test_paw_examples():
    assert enumerate_induced_paws(PAW_G) == [PawWitness("a0", "a1", "b1", "b2")]
    assert enumerate_induced_paws(complete(4)) == []
    # triangle x y z, pendant path z - p - q: the only paw is at the triangle
    g = graph([("x", "y"), ("y", "z"), ("x", "z"), ("z", "p"), ("p", "q")])
    assert enumerate_induced_paws(g) == [PawWitness("z", "p", "x", "y")]


def test_phi_examples():
    p = PawWitness("a0", "a1", "b1", "b2")
    assert check_phi(PAW_G, p) is None
    g = graph(PAW_G.edges() + [("z", "a1"), ("z", "b1")])
    assert check_phi(g, p) == "z"
    with pytest.raises(InputError):
        check_phi(g, PawWitness("a0", "z", "b1", "b2"))
    o = instance("S3")
    b = ball(o, o.roots, 5)
    paws = enumerate_induced_paws(b, sorted(neighborhood(o, o.roots, 3)), host=o)
    assert paws and all(check_phi(o, p) is not None for p in paws)


def test_preconditions():
    rep = check_preconditions(instance("S3"), 4)
    assert rep["ok"] and rep["two_connected"]["analytic_guarantee"]
    claw = finite_as_oracle(graph([("c", "x"), ("c", "y"), ("c", "z")]))
    rep = check_preconditions(claw, 2)
    assert not rep["ok"] and rep["claw_free"]["witness"]["center"] == "c"
    rep = check_preconditions(finite_as_oracle(PAW_G), 2)
    assert not rep["phi"]["ok"] and rep["phi"]["violation_count"] == 1
    plain = build_oracle({"base": {"kind": "S", "n": 3}, "transforms": []})
    assert not check_preconditions(plain, 3)["ok"]
    with pytest.raises(InputError):
        check_preconditions(plain, 1)


@pytest.mark.parametrize("name", sorted(INSTANCES))
def test_paw_via_ray(name):
    from clawham.driver import initial_cycle

    o = instance(name)
    c = initial_cycle(o)
    paw, ray = find_paw_via_ray(o, c)
    validate_paw(o, paw)
    assert ray[0] in c and all(v not in c for v in ray[1:])
    assert set(paw.vertices()) <= set(c.vertices) | set(ray)


def test_paw_via_ray_rejects_finite():
    g = cycle_graph(5)
    with pytest.raises(InputError):
        find_paw_via_ray(finite_as_oracle(g), OrientedCycle(g.vertices))
