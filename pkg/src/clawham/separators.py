"""Distance-increasing rays, umbrellas (finite blockers between a vertex set
and all ends) and the separator structure checks that come with them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InputError, InvariantViolation
from .graph import FiniteGraph, bfs_distances
from .oracle import GraphOracle, SeparatedView, _cut_depth, is_infinite_component


def _component_or_infinite(o: GraphOracle, s, v: str, cut_depth: int):
    """Explore the component of ``v`` in ``G - s``.

    Returns ``(True, None)`` as soon as it reaches ``cut_depth`` (so it is
    infinite), else ``(False, vertex set)``.
    """
    if o.depth(v) >= cut_depth:
        return True, None
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in o.neighbors(x):
            if y in seen or y in s:
                continue
            if o.depth(y) >= cut_depth:
                return True, None
            seen.add(y)
            queue.append(y)
    return False, seen


def distance_increasing_ray(o: GraphOracle, x: Iterable[str], length: int) -> list[str]:
    """Path ``r0 .. r_length`` with ``r0`` in ``x`` and ``dist(r_i, x) = i``.

    Each ``r_i`` (i >= 1) is chosen inside an infinite component of
    ``G - N_{i-1}(x)``, so the prefix extends to a ray; a depth-first search
    with backtracking handles dead ends.
    """
    if not o.infinite:
        raise InputError("a finite graph has no ray")
    xs = sorted(set(x))
    if not xs:
        raise InputError("ray needs a nonempty start set")
    if length < 0:
        raise InputError("ray length must be nonnegative")
    for v in xs:
        o.validate(v)
    dist = bfs_distances(o, xs, length)
    inner: list[frozenset] = []  # inner[i] = N_i(x)
    for i in range(length + 1):
        inner.append(frozenset(v for v, d in dist.items() if d <= i))
    good_cache: dict = {}

    def good(v: str, i: int) -> bool:
        key = (v, i)
        if key not in good_cache:
            s = inner[i - 1]
            inf, _ = _component_or_infinite(o, s, v, _cut_depth(o, s))
            good_cache[key] = inf
        return good_cache[key]

    path: list[str] = []

    def extend(v: str, i: int) -> bool:
        path.append(v)
        if i == length:
            return True
        for y in o.neighbors(v):
            if dist.get(y) == i + 1 and good(y, i + 1) and extend(y, i + 1):
                return True
        path.pop()
        return False

    for r0 in xs:
        if extend(r0, 0):
            return path
    raise InputError("no distance-increasing ray leaves the start set")


@dataclass
class InfiniteComponentHandle:
    """An infinite component of ``G - blocker``.

    ``label`` is its name in the separated view; ``anchor`` is its smallest
    vertex adjacent to the part's separator.
    """

    anchor: str
    label: str
    view: SeparatedView = field(repr=False, compare=False)
    infinite: bool = True

    def contains(self, v: str) -> bool:
        return self.view.label(v) == self.label

    def portion(self, sources: Iterable[str], radius: int) -> dict[str, int]:
        """Distances inside the component from ``sources`` (component
        vertices), up to ``radius``."""
        blocked = self.view.s
        start = [v for v in sources if self.contains(v)]
        return bfs_distances(_Restricted(self.view.o, self), start, radius, avoid=blocked)


class _Restricted:
    """Neighbour function of one component of ``G - blocker``."""

    def __init__(self, o: GraphOracle, handle: InfiniteComponentHandle):
        self.o = o
        self.h = handle

    def neighbors(self, v: str):
        return tuple(w for w in self.o.neighbors(v) if self.h.contains(w))


@dataclass(frozen=True)
class UmbrellaPart:
    S: frozenset
    K: InfiniteComponentHandle


@dataclass
class Umbrella:
    """Blocker between the finite base set ``x`` and every end."""

    x: frozenset
    blocker: frozenset
    k0: FiniteGraph
    parts: tuple
    view: SeparatedView = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.parts)

    def k0_vertices(self) -> frozenset:
        return frozenset(self.k0.vertices)

    def part_of(self, v: str) -> int | None:
        """Index of the part whose ``S`` contains ``v`` or whose component
        contains ``v``; None for ``K0``."""
        if v in self.blocker:
            for i, part in enumerate(self.parts):
                if v in part.S:
                    return i
        lab = self.view.label(v)
        return self._by_label.get(lab)

    def __post_init__(self):
        self._by_label = {p.K.label: i for i, p in enumerate(self.parts)}

    def to_json(self) -> dict:
        return {
            "blocker": sorted(self.blocker),
            "K0": list(self.k0.vertices),
            "parts": [{"S": sorted(p.S), "anchor": p.K.anchor} for p in self.parts],
        }


def compute_umbrella(o: GraphOracle, x: Iterable[str], *, validate: bool = True) -> Umbrella:
    """Inclusion-minimal blocker around ``x`` and its decomposition.

    Starts from ``N(x) - x`` and drops vertices in ascending order while the
    component of ``x`` stays finite.
    """
    if not o.infinite:
        raise InputError("umbrellas need an infinite graph")
    xs = frozenset(x)
    if not xs:
        raise InputError("umbrella base set is empty")
    for v in xs:
        o.validate(v)
    first = min(xs)
    reach = bfs_distances(_Induced(o, xs), [first])
    if len(reach) != len(xs):
        raise InputError("umbrella base set does not induce a connected graph")

    sphere = sorted({y for v in xs for y in o.neighbors(v) if y not in xs})
    current = set(sphere)
    k0 = set(xs)
    # any level at least as deep as every blocker vertex certifies infinity
    cut = _cut_depth(o, sphere)
    for t in sphere:
        grown = {t}
        keep = False
        for y in o.neighbors(t):
            if y in current or y in k0 or y in grown:
                continue
            inf, comp = _component_or_infinite(o, current, y, cut)
            if inf:
                keep = True
                break
            grown |= comp
        if not keep:
            current.discard(t)
            k0 |= grown
    blocker = frozenset(current)
    view = SeparatedView(o, blocker)
    groups: dict[str, set] = {}
    for s in sorted(blocker):
        for y in o.neighbors(s):
            if y in blocker or y in k0:
                continue
            lab = view.label(y)
            if not view.is_infinite(lab):
                raise InvariantViolation("blocker leaves a second finite component", witness=[s, y])
            groups.setdefault(lab, set()).add(s)
    parts = []
    for lab, S in groups.items():
        anchor = min(y for s in S for y in o.neighbors(s) if view.label(y) == lab)
        parts.append(UmbrellaPart(frozenset(S), InfiniteComponentHandle(anchor, lab, view)))
    parts.sort(key=lambda p: min(p.S))
    k0_graph = FiniteGraph({v: [w for w in o.neighbors(v) if w in k0] for v in k0})
    u = Umbrella(xs, blocker, k0_graph, tuple(parts), view)
    if validate:
        problems = umbrella_problems(o, u)
        if problems:
            raise InvariantViolation(f"umbrella invariant failed: {problems[0]['check']}", witness=problems)
    return u


class _Induced:
    def __init__(self, o, keep):
        self.o = o
        self.keep = keep

    def neighbors(self, v):
        return tuple(w for w in self.o.neighbors(v) if w in self.keep)


def umbrella_problems(o: GraphOracle, u: Umbrella, *, minimality: bool = True) -> list[dict]:
    """Every violated umbrella invariant, as report entries."""
    out = []
    k0 = u.k0_vertices()
    if u.blocker & k0:
        out.append({"check": "blocker_disjoint_from_K0", "witness": sorted(u.blocker & k0)[:5]})
    if not u.x <= k0:
        out.append({"check": "base_inside_K0", "witness": sorted(u.x - k0)[:5]})
    union = set()
    for p in u.parts:
        if union & p.S:
            out.append({"check": "parts_disjoint", "witness": sorted(union & p.S)[:5]})
        union |= p.S
    if union != set(u.blocker):
        out.append({"check": "parts_cover_blocker", "witness": sorted(set(u.blocker) ^ union)[:5]})
    if not u.parts:
        out.append({"check": "at_least_one_infinite_component", "witness": None})
    view = SeparatedView(o, u.blocker)
    labels = [view.label(p.K.anchor) for p in u.parts]
    if len(set(labels)) != len(labels):
        out.append({"check": "distinct_components", "witness": labels})
    for p, lab in zip(u.parts, labels):
        if not view.is_infinite(lab):
            out.append({"check": "component_infinite", "witness": p.K.anchor})
        if not any(p.K.anchor in o.neighbors(s) for s in p.S):
            out.append({"check": "anchor_adjacent_to_S", "witness": p.K.anchor})
    lab_index = {lab: i for i, lab in enumerate(labels)}
    for s in sorted(u.blocker):
        nb = o.neighbors(s)
        if not any(y in k0 for y in nb):
            out.append({"check": "blocker_touches_K0", "witness": s})
        touched = set()
        for y in nb:
            if y in u.blocker:
                continue
            if y in k0:
                continue
            lab = view.label(y)
            if lab not in lab_index:
                out.append({"check": "single_finite_component", "witness": [s, y]})
            else:
                touched.add(lab_index[lab])
        own = [i for i, p in enumerate(u.parts) if s in p.S]
        if touched != set(own):
            out.append({"check": "exclusive_adjacency", "witness": {"vertex": s, "touches": sorted(touched), "part": own}})
    # K0 is exactly the component of x
    comp = bfs_distances(o, [min(u.x)], avoid=u.blocker) if not _escapes(o, u, view) else None
    if comp is None or set(comp) != set(k0):
        out.append({"check": "K0_is_component_of_base", "witness": None})
    if minimality:
        # s touches K0, so the base set's component in G - (blocker - s)
        # is the component of s there
        cut = _cut_depth(o, u.blocker)
        for s in sorted(u.blocker):
            if not is_infinite_component(o, u.blocker - {s}, s, cut_depth=cut):
                out.append({"check": "minimality", "witness": s})
    return out


def _escapes(o, u, view) -> bool:
    lab = view.label(min(u.x))
    return view.is_infinite(lab)


def check_separator_facts(o: GraphOracle, u: Umbrella, working_radius: int = 3, *, umbrella: bool = True) -> dict:
    """Per part: ``G - S_i`` has exactly two components next to ``S_i``, each
    vertex of ``S_i`` sees both, and its neighbourhood inside each is a
    clique.

    Sides are read from the umbrella's own labelling: ``K_i`` is a component
    of ``G - S_i`` (its neighbourhood is ``S_i``), and everything else outside
    ``S_i`` hangs together through the connected ``K0``, which every other
    blocker vertex and, through it, every other ``K_l`` touches.  That
    argument needs the umbrella checks, which run first unless
    ``umbrella=False`` says the caller already ran them.
    ``working_radius`` bounds the reported local picture only.
    """
    report = {"ok": True, "parts": [], "umbrella": []}
    if umbrella:
        problems = umbrella_problems(o, u)
        report["umbrella"] = problems
        if problems:
            report["ok"] = False
    view = u.view
    for i, p in enumerate(u.parts):
        inner = p.K.label
        entry = {"index": i, "S": sorted(p.S), "violations": []}
        sides: dict[str, list] = {}
        for s in sorted(p.S):
            for y in o.neighbors(s):
                if y in p.S:
                    continue
                side = "inner" if y not in u.blocker and view.label(y) == inner else "outer"
                sides.setdefault(side, []).append(y)
        entry["components"] = len(sides)
        if len(sides) != 2:
            entry["violations"].append({"check": "exactly_two_components", "count": len(sides)})
        for s in sorted(p.S):
            nb = set(o.neighbors(s))
            for side, members in sorted(sides.items()):
                side_nb = sorted(y for y in nb if y in set(members))
                if not side_nb:
                    entry["violations"].append({"check": "touches_every_side", "vertex": s, "side": side})
                    continue
                for a_i in range(len(side_nb)):
                    a = side_nb[a_i]
                    na = o.neighbors(a)
                    bad = [b for b in side_nb[a_i + 1:] if b not in na]
                    if bad:
                        entry["violations"].append({"check": "neighbourhood_clique", "vertex": s,
                                                    "pair": [a, bad[0]]})
                        break
        if working_radius:
            entry["working_ball"] = len(bfs_distances(o, p.S, working_radius))
        if entry["violations"]:
            report["ok"] = False
        report["parts"].append(entry)
    return report


def three_neighborhood_targets(o: GraphOracle, u: Umbrella, radius: int = 3) -> list[frozenset]:
    """For each part, the vertices of ``K_i`` within distance ``radius`` of
    ``S_i`` (distance measured in ``G``)."""
    out = []
    for p in u.parts:
        dist = bfs_distances(o, p.S, radius)
        out.append(frozenset(v for v in dist if v not in u.blocker and p.K.contains(v)))
    return out


def umbrella_from_parts(o: GraphOracle, x: Iterable[str], parts: Iterable) -> Umbrella:
    """Rebuild an umbrella from its base set and ``(S, anchor)`` pairs, with
    components recomputed exactly (used to re-check recorded umbrellas)."""
    xs = frozenset(x)
    pairs = [(frozenset(S), anchor) for S, anchor in parts]
    blocker = frozenset().union(*[S for S, _ in pairs]) if pairs else frozenset()
    view = SeparatedView(o, blocker)
    lab0 = view.label(min(xs))
    if lab0 is None or view.is_infinite(lab0):
        raise InputError("recorded blocker does not enclose the base set in a finite component")
    k0 = view.explored(lab0)
    k0_graph = FiniteGraph({v: [w for w in o.neighbors(v) if w in k0] for v in k0})
    built = [UmbrellaPart(S, InfiniteComponentHandle(anchor, view.label(anchor), view)) for S, anchor in pairs]
    return Umbrella(xs, blocker, k0_graph, tuple(built), view)
