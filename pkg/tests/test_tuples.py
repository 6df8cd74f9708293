from __future__ import annotations

import pytest

from clawham.driver import bootstrap, initial_cycle
from clawham.errors import InputError, ResourceCapExceeded
from clawham.extension import TYPE1, WorkingCycle, find_extension
from clawham.forbidden import check_preconditions
from clawham.graph import OrientedCycle, validate_cycle
from clawham.separators import compute_umbrella, three_neighborhood_targets
from clawham.tuples import (CutTracker, Membership, PromisingTuple, _protected_edges, build_good, build_promising,
                            extend_to_k0, good_problems, promising_problems)

from conftest import instance, lollipop_instance


def start(o):
    c, _ = bootstrap(o, initial_cycle(o))
    return c, compute_umbrella(o, c.vertices)


@pytest.fixture(scope="module")
def s3():
    o = instance("S3")
    c, u = start(o)
    return o, c, u


def test_extend_to_k0(s3):
    o, c, u = s3
    k0 = u.k0_vertices()
    out = extend_to_k0(o, c, u)
    assert out.vertex_set() == k0 and not out.vertex_set() & u.blocker
    assert validate_cycle(o, out)[0]
    assert _protected_edges(o, c, k0) <= out.edges()
    assert extend_to_k0(o, out, u) == out


def test_extend_to_k0_single_type1_step(s3):
    o, c, u = s3
    full = extend_to_k0(o, c, u)
    seq = list(full.vertices)
    i = next(i for i in range(len(seq)) if seq[i - 1] in o.neighbors(seq[(i + 1) % len(seq)]))
    v = seq.pop(i)
    shorter = OrientedCycle(seq)
    assert find_extension(o, shorter, v).kind == TYPE1
    assert extend_to_k0(o, shorter, u).vertex_set() == full.vertex_set()


def test_extend_to_k0_rejects_outside_cycle(s3):
    o, c, u = s3
    far = sorted(u.blocker)[:1]
    with pytest.raises(InputError):
        extend_to_k0(o, OrientedCycle(list(c.vertices) + far), u)


def test_promising_on_star(s3):
    o, c, u = s3
    assert u.k == 3
    p = build_promising(o, c, u)
    assert promising_problems(o, p) == []
    cyc = p.cycle
    for part, cross in zip(u.parts, p.crossing):
        on = [s for s in part.S if s in cyc]
        assert len(on) == 2
        assert not any(cyc.successor(s) in part.S for s in on)
        assert len(cross) == 2
    for t in three_neighborhood_targets(o, u):
        assert t <= cyc.vertex_set()


def test_good_on_star(s3):
    o, c, u = s3
    p = build_promising(o, c, u)
    g = build_good(o, p, u, c)
    assert good_problems(o, g) == []
    have = g.cycle.vertex_set()
    for part, t in zip(u.parts, three_neighborhood_targets(o, u)):
        assert part.S | t <= have
    # crossing sets agree with a tracker rebuilt from scratch
    fresh = CutTracker(WorkingCycle.of(g.cycle), g.membership)
    assert fresh.crossing == g.crossing and all(len(x) == 2 for x in g.crossing)
    # rerunning on a cycle that already holds the blocker changes nothing
    again = build_good(o, PromisingTuple(g.cycle, u, g.membership.copy(), g.crossing, [], []), u, c)
    assert again.steps == [] and again.cycle == g.cycle
    assert [again.membership.delta_json(j) for j in range(u.k)] == [g.membership.delta_json(j) for j in range(u.k)]


def test_single_part_instance():
    o = lollipop_instance()
    assert check_preconditions(o, 5)["ok"]
    c, u = start(o)
    assert u.k == 1
    p = build_promising(o, c, u)
    assert promising_problems(o, p) == []
    g = build_good(o, p, u, c)
    assert good_problems(o, g) == []
    assert len(g.crossing[0]) == 2 and u.blocker <= g.cycle.vertex_set()


def test_membership_updates(s3):
    o, c, u = s3
    m = Membership(u)
    s = min(u.parts[0].S)
    assert m.contains(0, s) and m.owners(s) == {0}
    m.add(1, s)
    assert m.owners(s) == {0, 1}
    m.remove(0, s)
    assert m.owners(s) == {1} and m.delta_json(0) == {"added": [], "removed": [s]}
    copy = m.copy()
    copy.remove(1, s)
    assert m.owners(s) == {1} and copy.owners(s) == set()


def test_cap_below_four(s3):
    o, c, u = s3
    with pytest.raises(ResourceCapExceeded):
        build_promising(o, c, u, cap=3)
