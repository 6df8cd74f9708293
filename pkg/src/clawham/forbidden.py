"""Induced claws and paws, the common-neighbour condition on paws, and the
hypothesis report for a graph instance."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import HypothesisViolation, InputError, PreconditionError
from .graph import FiniteGraph, OrientedCycle, articulation_points, bfs_distances, is_two_connected
from .oracle import FiniteOracle, GraphOracle, ball


@dataclass(frozen=True)
class ClawWitness:
    center: str
    leaves: tuple[str, str, str]

    def to_json(self) -> dict:
        return {"center": self.center, "leaves": list(self.leaves)}


@dataclass(frozen=True)
class PawWitness:
    """Induced paw: ``a0`` has degree 3, ``a1`` is the pendant vertex and
    ``b1 < b2`` close the triangle with ``a0``."""

    a0: str
    a1: str
    b1: str
    b2: str

    def vertices(self) -> tuple[str, str, str, str]:
        return (self.a0, self.a1, self.b1, self.b2)

    def to_json(self) -> dict:
        return {"a0": self.a0, "a1": self.a1, "b1": self.b1, "b2": self.b2}


def _scope(g: FiniteGraph, scope: Iterable[str] | None, host) -> list[str]:
    verts = sorted(g.vertices if scope is None else set(scope))
    for v in verts:
        if v not in g:
            raise InputError(f"scope vertex {v!r} is not in the graph")
        if host is not None and set(host.neighbors(v)) != set(g.neighbors(v)):
            raise PreconditionError(f"neighbourhood of {v!r} is clipped by the finite window")
    return verts


def find_claw(g: FiniteGraph, scope: Iterable[str] | None = None, host=None) -> ClawWitness | None:
    """First induced claw centred in ``scope`` (canonical order).

    ``host`` is the graph ``g`` was cut from; when given, every scope vertex
    must keep its whole neighbourhood in ``g``.
    """
    for c in _scope(g, scope, host):
        nb = g.neighbors(c)
        for a, b, d in combinations(nb, 3):
            if not g.has_edge(a, b) and not g.has_edge(a, d) and not g.has_edge(b, d):
                return ClawWitness(c, (a, b, d))
    return None


def enumerate_induced_paws(g: FiniteGraph, scope: Iterable[str] | None = None, host=None) -> list[PawWitness]:
    """All induced paws whose degree-3 vertex lies in ``scope``."""
    out = []
    for a0 in _scope(g, scope, host):
        nb = g.neighbors(a0)
        for b1, b2 in combinations(nb, 2):
            if not g.has_edge(b1, b2):
                continue
            for a1 in nb:
                if a1 in (b1, b2) or g.has_edge(a1, b1) or g.has_edge(a1, b2):
                    continue
                out.append(PawWitness(a0, a1, b1, b2))
    out.sort(key=PawWitness.vertices)
    return out


def validate_paw(o, p: PawWitness) -> None:
    """Raise InputError naming the first pair that breaks the paw shape."""
    vs = p.vertices()
    if len(set(vs)) != 4:
        raise InputError(f"paw vertices are not distinct: {vs}")
    want = {(p.a0, p.a1), (p.a0, p.b1), (p.a0, p.b2), (p.b1, p.b2)}
    for x, y in combinations(vs, 2):
        edge = (x, y) in want or (y, x) in want
        if (y in o.neighbors(x)) != edge:
            raise InputError(f"pair ({x}, {y}) breaks the induced paw")


def common_outside(o, a: str, b: str, outside: Iterable[str]) -> list[str]:
    skip = set(outside)
    nb = set(o.neighbors(b))
    return sorted(z for z in o.neighbors(a) if z in nb and z not in skip)


def check_phi(o, p: PawWitness) -> str | None:
    """Smallest common neighbour of ``a1`` and ``b1`` outside the paw, else
    of ``a1`` and ``b2``; None when neither exists."""
    validate_paw(o, p)
    for b in (p.b1, p.b2):
        zs = common_outside(o, p.a1, b, p.vertices())
        if zs:
            return zs[0]
    return None


CAVEAT = ("2-connectivity of an infinite graph cannot be decided from a finite "
          "window; the verdict covers the ball interior only unless the "
          "generator carries an analytic guarantee")


def check_preconditions(o: GraphOracle, radius: int) -> dict:
    """Claw-freeness, the paw condition and 2-connectivity around the roots.

    For infinite oracles the checks cover every vertex whose neighbourhood
    closes inside the radius ball around the roots.  Finite oracles are
    checked on the whole graph.
    """
    if radius < 2:
        raise InputError("check radius must be at least 2")
    if isinstance(o, FiniteOracle):
        g = o.graph
        interior = list(g.vertices)
        exact = True
    else:
        g = ball(o, o.roots, radius)
        dist = bfs_distances(g, o.roots)
        interior = sorted(v for v, d in dist.items() if d < radius)
        exact = False
    claw = find_claw(g, interior, host=o)
    paws = enumerate_induced_paws(g, interior, host=o)
    violations = []
    for p in paws:
        if check_phi(o, p) is None:
            violations.append(p.to_json())
    if exact:
        two_conn = is_two_connected(g)
        cut_vertices = articulation_points(g)
    else:
        inner = set(interior)
        cut_vertices = [v for v in articulation_points(g) if v in inner]
        two_conn = not cut_vertices and len(g) >= 3
    report = {
        "radius": radius,
        "exact": exact,
        "ball_vertices": len(g),
        "interior_vertices": len(interior),
        "claw_free": {"ok": claw is None, "witness": None if claw is None else claw.to_json()},
        "phi": {"ok": not violations, "paws_checked": len(paws), "violations": violations[:20],
                "violation_count": len(violations)},
        "two_connected": {
            "ok": two_conn,
            "cutvertices": cut_vertices[:20],
            "scope": "graph" if exact else "ball",
            "analytic_guarantee": bool(getattr(o, "two_connected_guarantee", False)),
            "caveat": None if exact else CAVEAT,
        },
    }
    report["ok"] = report["claw_free"]["ok"] and report["phi"]["ok"] and two_conn
    return report


def find_paw_via_ray(o: GraphOracle, c: OrientedCycle, ray_length: int = 2) -> tuple[PawWitness, list[str]]:
    """Induced paw next to the cycle ``c``, built from a distance-increasing
    ray ``r0 r1 r2 ...`` that leaves ``V(c)``.

    Returns the paw and the ray prefix used.
    """
    from .separators import distance_increasing_ray

    if not o.infinite:
        raise InputError("a finite graph has no ray")
    ray = distance_increasing_ray(o, c.vertex_set(), max(2, ray_length))
    r0, r1, r2 = ray[0], ray[1], ray[2]
    plus, minus = c.successor(r0), c.predecessor(r0)
    n1 = set(o.neighbors(r1))
    paw = None
    for x in (plus, minus):
        if x in n1:
            # triangle x r0 r1 with pendant r2 on r1
            b1, b2 = sorted((x, r0))
            paw = PawWitness(r1, r2, b1, b2)
            break
    if paw is None:
        if minus in o.neighbors(plus):
            b1, b2 = sorted((plus, minus))
            paw = PawWitness(r0, r1, b1, b2)
        else:
            raise HypothesisViolation("claw at the ray start", "claw",
                                      ClawWitness(r0, tuple(sorted((plus, minus, r1)))))
    validate_paw(o, paw)
    return paw, ray
