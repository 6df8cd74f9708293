"""Lazily presented locally finite graphs.

An oracle answers ``neighbors(v)`` for string tokens and carries a level
function ``depth`` (graph distance to the finite root set).  Exact
infinity and same-component answers for ``G - S`` rest on two facts every
generator here provides:

* each vertex ``x`` starts a ray whose other vertices are all deeper than
  ``x`` (so a vertex deeper than all of ``S`` lies in an infinite component);
* ``piece(v, d)`` names the component of ``G[depth >= d]`` containing ``v``
  and ``level_members(key, d)`` lists that component's vertices at depth
  exactly ``d`` (finite).

With ``D >= max depth(S)`` every path between two vertices of depth at most
``D + 1`` either stays at depth at most ``D + 1`` or leaves and re-enters
through depth ``D + 1`` vertices of one piece.  Exploring the finite region
``depth <= D + 1`` with jumps between level members of a piece is therefore
an exact connectivity test.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InputError
from .graph import FiniteGraph, bfs_distances, components

_CACHE = 1 << 20


class GraphOracle:
    """Base class: locally finite graph given by a neighbour function."""

    infinite: bool = True
    two_connected_guarantee: bool = False
    roots: tuple[str, ...] = ()

    def neighbors(self, v: str) -> tuple[str, ...]:
        raise NotImplementedError

    def depth(self, v: str) -> int:
        raise NotImplementedError

    def piece(self, v: str, d: int):
        raise NotImplementedError

    def level_members(self, key, d: int) -> tuple[str, ...]:
        raise NotImplementedError

    def validate(self, v: str) -> None:
        """Raise InputError unless ``v`` is a vertex."""
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError

    def has_vertex(self, v: str) -> bool:
        try:
            self.validate(v)
        except InputError:
            return False
        return True

    def __contains__(self, v) -> bool:
        return isinstance(v, str) and self.has_vertex(v)


# --------------------------------------------------------------------------
# rooted trees S_n, D_n, T_n

class RootedTree(GraphOracle):
    """Infinite trees addressed by child-index paths ``r.i.j...``.

    ``S``: root of degree n, all else degree 2.  ``T``: n-regular.
    ``D``: double-ray spine of degree-n vertices with n-2 pendant rays each;
    root children 0 and 1 start the positive and negative spine halves.
    """

    def __init__(self, kind: str, n: int):
        if kind not in ("S", "D", "T"):
            raise InputError(f"unknown tree kind {kind!r}")
        if not isinstance(n, int) or n < 3:
            raise InputError(f"tree parameter n must be an integer >= 3, got {n!r}")
        self.kind = kind
        self.n = n
        self.roots = ("r",)
        self.infinite = True
        self.two_connected_guarantee = False
        self._path = lru_cache(maxsize=_CACHE)(self._parse)
        self.neighbors = lru_cache(maxsize=_CACHE)(self._neighbors)

    def spec(self) -> dict:
        return {"base": {"kind": self.kind, "n": self.n}, "transforms": []}

    @staticmethod
    def token(path: Iterable[int]) -> str:
        return ".".join(["r", *map(str, path)])

    def _parse(self, v: str) -> tuple[int, ...]:
        if not isinstance(v, str):
            raise InputError(f"vertex token must be a string, got {v!r}")
        parts = v.split(".")
        if parts[0] != "r":
            raise InputError(f"not a tree vertex: {v!r}")
        try:
            path = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise InputError(f"not a tree vertex: {v!r}") from None
        for i in range(len(path)):
            if not 0 <= path[i] < self._child_count(path[:i]) or str(path[i]) != parts[i + 1]:
                raise InputError(f"not a tree vertex: {v!r}")
        return path

    def _is_spine(self, path: tuple[int, ...]) -> bool:
        return len(path) >= 1 and path[0] in (0, 1) and all(p == 0 for p in path[1:])

    def _child_count(self, path: tuple[int, ...]) -> int:
        if not path:
            return self.n
        if self.kind == "S":
            return 1
        if self.kind == "T":
            return self.n - 1
        return self.n - 1 if self._is_spine(path) else 1

    def validate(self, v: str) -> None:
        self._path(v)

    def _neighbors(self, v: str) -> tuple[str, ...]:
        path = self._path(v)
        out = [self.token(path + (i,)) for i in range(self._child_count(path))]
        if path:
            out.append(self.token(path[:-1]))
        return tuple(sorted(out))

    def depth(self, v: str) -> int:
        return len(self._path(v))

    def piece(self, v: str, d: int):
        path = self._path(v)
        if d > len(path):
            raise InputError(f"{v!r} is shallower than {d}")
        return self.token(path[:d])

    def level_members(self, key, d: int) -> tuple[str, ...]:
        return (key,)


def tree_S(n: int) -> RootedTree:
    return RootedTree("S", n)


def tree_D(n: int) -> RootedTree:
    return RootedTree("D", n)


def tree_T(n: int) -> RootedTree:
    return RootedTree("T", n)


# --------------------------------------------------------------------------
# transforms

def _split_top(s: str, sep: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(s[start:i])
            start = i + 1
    parts.append(s[start:])
    return parts


class LineGraph(GraphOracle):
    """Vertices are base edges ``(a|b)`` with ``a < b``; adjacent iff they
    share an endpoint."""

    def __init__(self, base: GraphOracle):
        self.base = base
        self.infinite = base.infinite
        self.two_connected_guarantee = False
        self._ends = lru_cache(maxsize=_CACHE)(self._parse)
        self.neighbors = lru_cache(maxsize=_CACHE)(self._neighbors)
        self.depth = lru_cache(maxsize=_CACHE)(self._depth)
        roots = set()
        for r in base.roots:
            for x in base.neighbors(r):
                roots.add(self.token(r, x))
        if not roots:
            raise InputError("line graph of an edgeless base has no vertices")
        self.roots = tuple(sorted(roots))

    def spec(self) -> dict:
        doc = self.base.spec()
        return {"base": doc["base"], "transforms": doc["transforms"] + [{"op": "line_graph"}]}

    @staticmethod
    def token(a: str, b: str) -> str:
        if a > b:
            a, b = b, a
        return f"({a}|{b})"

    def _parse(self, v: str) -> tuple[str, str]:
        if not isinstance(v, str) or len(v) < 5 or v[0] != "(" or v[-1] != ")":
            raise InputError(f"not a line-graph vertex: {v!r}")
        parts = _split_top(v[1:-1], "|")
        if len(parts) != 2:
            raise InputError(f"not a line-graph vertex: {v!r}")
        a, b = parts
        if not a < b:
            raise InputError(f"non-canonical line-graph vertex: {v!r}")
        self.base.validate(a)
        if b not in self.base.neighbors(a):
            raise InputError(f"{a!r} and {b!r} are not adjacent in the base")
        return a, b

    def validate(self, v: str) -> None:
        self._ends(v)

    def endpoints(self, v: str) -> tuple[str, str]:
        return self._ends(v)

    def _neighbors(self, v: str) -> tuple[str, ...]:
        a, b = self._ends(v)
        out = {self.token(a, x) for x in self.base.neighbors(a) if x != b}
        out.update(self.token(b, y) for y in self.base.neighbors(b) if y != a)
        return tuple(sorted(out))

    def _depth(self, v: str) -> int:
        a, b = self._ends(v)
        return min(self.base.depth(a), self.base.depth(b))

    def piece(self, v: str, d: int):
        a, b = self._ends(v)
        if self.base.depth(a) > self.base.depth(b):
            a = b
        return self.base.piece(a, d)

    def level_members(self, key, d: int) -> tuple[str, ...]:
        out = set()
        for a in self.base.level_members(key, d):
            for x in self.base.neighbors(a):
                if self.base.depth(x) >= d:
                    out.add(self.token(a, x))
        return tuple(sorted(out))


class BlowUp(GraphOracle):
    """Each base vertex ``v`` becomes the clique ``v#0 .. v#(k-1)``."""

    def __init__(self, base: GraphOracle, k: int):
        if not isinstance(k, int) or k < 1:
            raise InputError(f"blow-up factor must be an integer >= 1, got {k!r}")
        self.base = base
        self.k = k
        self.infinite = base.infinite
        # Removing one vertex leaves a twin of it behind, so a k >= 2
        # blow-up of a connected graph on >= 2 vertices has no cutvertex.
        self.two_connected_guarantee = k >= 2 and (base.infinite or _finite_connected(base))
        self.roots = tuple(sorted(self.token(r, i) for r in base.roots for i in range(k)))
        self._split = lru_cache(maxsize=_CACHE)(self._parse)
        self.neighbors = lru_cache(maxsize=_CACHE)(self._neighbors)

    def spec(self) -> dict:
        doc = self.base.spec()
        return {"base": doc["base"], "transforms": doc["transforms"] + [{"op": "blow_up", "k": self.k}]}

    @staticmethod
    def token(v: str, i: int) -> str:
        return f"{v}#{i}"

    def _parse(self, v: str) -> tuple[str, int]:
        if not isinstance(v, str) or "#" not in v:
            raise InputError(f"not a blow-up vertex: {v!r}")
        head, _, idx = v.rpartition("#")
        if not idx.isdigit() or str(int(idx)) != idx or int(idx) >= self.k:
            raise InputError(f"bad copy index in {v!r}")
        self.base.validate(head)
        return head, int(idx)

    def validate(self, v: str) -> None:
        self._split(v)

    def project(self, v: str) -> str:
        return self._split(v)[0]

    def _neighbors(self, v: str) -> tuple[str, ...]:
        head, i = self._split(v)
        out = [self.token(head, j) for j in range(self.k) if j != i]
        out.extend(self.token(w, j) for w in self.base.neighbors(head) for j in range(self.k))
        return tuple(sorted(out))

    def depth(self, v: str) -> int:
        return self.base.depth(self._split(v)[0])

    def piece(self, v: str, d: int):
        return self.base.piece(self._split(v)[0], d)

    def level_members(self, key, d: int) -> tuple[str, ...]:
        return tuple(sorted(self.token(v, i) for v in self.base.level_members(key, d) for i in range(self.k)))


class FiniteOracle(GraphOracle):
    """A finite graph seen through the oracle interface."""

    def __init__(self, g: FiniteGraph, *, spec_doc: dict | None = None):
        self.graph = g
        self.infinite = False
        self.roots = tuple(comp[0] for comp in components(g))
        self.two_connected_guarantee = False
        self._spec = spec_doc
        self._depth = bfs_distances(g, self.roots)

    def spec(self) -> dict:
        if self._spec is not None:
            return self._spec
        return {"base": {"kind": "finite", "graph": self.graph.to_json()}, "transforms": []}

    def neighbors(self, v: str) -> tuple[str, ...]:
        return self.graph.neighbors(v)

    def validate(self, v: str) -> None:
        if v not in self.graph:
            raise InputError(f"unknown vertex {v!r}")

    def depth(self, v: str) -> int:
        self.validate(v)
        return self._depth[v]

    def piece(self, v: str, d: int):
        raise InputError("finite oracles do not use level pieces")

    def level_members(self, key, d: int):
        raise InputError("finite oracles do not use level pieces")


def _finite_connected(o: GraphOracle) -> bool:
    return isinstance(o, FiniteOracle) and len(o.roots) == 1 and len(o.graph) >= 2


def finite_as_oracle(g: FiniteGraph) -> FiniteOracle:
    return FiniteOracle(g)


def line_graph(base: GraphOracle) -> GraphOracle:
    if not base.infinite:
        return _materialize(LineGraph, base, {"op": "line_graph"})
    return LineGraph(base)


def blow_up(base: GraphOracle, k: int) -> GraphOracle:
    if not isinstance(k, int) or k < 1:
        raise InputError(f"blow-up factor must be an integer >= 1, got {k!r}")
    if not base.infinite:
        return _materialize(BlowUp, base, {"op": "blow_up", "k": k})
    return BlowUp(base, k)


def _materialize(lazy_cls, base: "FiniteOracle", step: dict) -> "FiniteOracle":
    # A transform of a finite graph is finite: build it explicitly.
    g0 = base.graph
    if lazy_cls is LineGraph:
        adj = {}
        for a, b in g0.edges():
            t = LineGraph.token(a, b)
            nb = {LineGraph.token(a, x) for x in g0.neighbors(a) if x != b}
            nb.update(LineGraph.token(b, y) for y in g0.neighbors(b) if y != a)
            adj[t] = nb
    else:
        k = step["k"]
        adj = {}
        for v in g0.vertices:
            for i in range(k):
                nb = {BlowUp.token(v, j) for j in range(k) if j != i}
                nb.update(BlowUp.token(w, j) for w in g0.neighbors(v) for j in range(k))
                adj[BlowUp.token(v, i)] = nb
    doc = base.spec()
    spec_doc = {"base": doc["base"], "transforms": doc["transforms"] + [step]}
    out = FiniteOracle(FiniteGraph(adj), spec_doc=spec_doc)
    if lazy_cls is BlowUp:
        out.two_connected_guarantee = step["k"] >= 2 and _finite_connected(base)
    return out


# --------------------------------------------------------------------------
# graph-spec documents

def build_oracle(doc: Mapping) -> GraphOracle:
    """Build an oracle from a graph-spec document."""
    if not isinstance(doc, Mapping) or "base" not in doc:
        raise InputError("graph spec needs a 'base' entry")
    base = doc["base"]
    if not isinstance(base, Mapping):
        raise InputError("'base' must be an object")
    kind = base.get("kind")
    if kind in ("S", "D", "T"):
        o: GraphOracle = RootedTree(kind, base.get("n"))
    elif kind == "finite":
        if "graph" not in base:
            raise InputError("finite base needs a 'graph'")
        o = FiniteOracle(FiniteGraph.from_json(base["graph"]))
    else:
        raise InputError(f"unknown base kind {kind!r}")
    transforms = doc.get("transforms", [])
    if not isinstance(transforms, list):
        raise InputError("'transforms' must be a list")
    for step in transforms:
        op = step.get("op") if isinstance(step, Mapping) else None
        if op == "line_graph":
            o = line_graph(o)
        elif op == "blow_up":
            o = blow_up(o, step.get("k"))
        else:
            raise InputError(f"unknown transform {step!r}")
    return o


def load_spec(path: str) -> GraphOracle:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read graph spec {path}: {exc}") from None
    return build_oracle(doc)


# --------------------------------------------------------------------------
# balls, components and ends

def ball(o: GraphOracle, x: Iterable[str], r: int) -> FiniteGraph:
    """Induced subgraph on ``N_r(x)``."""
    x = sorted(set(x))
    if not x:
        raise InputError("ball needs a nonempty centre set")
    if r < 0:
        raise InputError("radius must be nonnegative")
    for v in x:
        o.validate(v)
    dist = bfs_distances(o, x, r)
    return FiniteGraph({v: [w for w in o.neighbors(v) if w in dist] for v in dist})


def _cut_depth(o: GraphOracle, s: Iterable[str]) -> int:
    s = list(s)
    return max(o.depth(x) for x in s) + 1 if s else 0


def is_infinite_component(o: GraphOracle, s: Iterable[str], v: str, *, cut_depth: int | None = None) -> bool:
    """Whether the component of ``v`` in ``G - s`` is infinite (exact)."""
    s = s if isinstance(s, (set, frozenset)) else frozenset(s)
    if v in s:
        raise InputError(f"{v!r} lies in the removed set")
    o.validate(v)
    if not o.infinite:
        return False
    if cut_depth is None:
        cut_depth = _cut_depth(o, s)
    if o.depth(v) >= cut_depth:
        return True
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in o.neighbors(x):
            if y in seen or y in s:
                continue
            if o.depth(y) >= cut_depth:
                return True
            seen.add(y)
            queue.append(y)
    return False


class SeparatedView:
    """Exact component labelling of ``G - s``.

    Labels are the smallest token of the component's explored part, so they
    do not depend on query order.
    """

    def __init__(self, o: GraphOracle, s: Iterable[str]):
        self.o = o
        self.s = frozenset(s)
        for x in self.s:
            o.validate(x)
        self.cut_depth = _cut_depth(o, self.s) if o.infinite else None
        self._label: dict[str, str] = {}
        self._piece_label: dict = {}
        self._infinite: dict[str, bool] = {}
        self._members: dict[str, frozenset] = {}

    def label(self, v: str) -> str | None:
        if v in self.s:
            return None
        lab = self._label.get(v)
        if lab is not None:
            return lab
        if self.o.infinite:
            d = self.o.depth(v)
            if d > self.cut_depth:
                key = self.o.piece(v, self.cut_depth)
                lab = self._piece_label.get(key)
                if lab is None:
                    lab = self._explore(self.o.level_members(key, self.cut_depth)[0])
                return lab
        else:
            self.o.validate(v)
        return self._explore(v)

    def _explore(self, v: str) -> str:
        o, s, cut = self.o, self.s, self.cut_depth
        seen = {v}
        queue = deque([v])
        pieces = []
        infinite = False
        while queue:
            x = queue.popleft()
            if cut is not None and o.depth(x) == cut:
                infinite = True
                key = o.piece(x, cut)
                if key not in self._piece_label:
                    self._piece_label[key] = None
                    pieces.append(key)
                    for m in o.level_members(key, cut):
                        if m not in seen and m not in s:
                            seen.add(m)
                            queue.append(m)
            for y in o.neighbors(x):
                if y in seen or y in s:
                    continue
                if cut is not None and o.depth(y) > cut:
                    continue
                seen.add(y)
                queue.append(y)
        lab = min(seen)
        for x in seen:
            self._label[x] = lab
        for key in pieces:
            self._piece_label[key] = lab
        self._infinite[lab] = infinite
        self._members[lab] = frozenset(seen)
        return lab

    def is_infinite(self, lab: str) -> bool:
        return self._infinite[lab]

    def explored(self, lab: str) -> frozenset[str]:
        """Vertices of the component at depth at most the cut level (all of
        it for finite components)."""
        return self._members[lab]

    def same(self, a: str, b: str) -> bool:
        la = self.label(a)
        return la is not None and la == self.label(b)

    def infinite_labels(self) -> list[str]:
        labs = set()
        for x in self.s:
            for y in self.o.neighbors(x):
                lab = self.label(y)
                if lab is not None and self._infinite[lab]:
                    labs.add(lab)
        if not self.s and self.o.infinite:
            labs.add(self.label(self.o.roots[0]))
        return sorted(labs)


@dataclass(frozen=True)
class EndDescriptor:
    """An infinite component of ``G - separator`` named by its anchor."""

    separator: frozenset
    anchor: str

    def to_json(self) -> dict:
        return {"separator": sorted(self.separator), "anchor": self.anchor}


def end_descriptors(o: GraphOracle, s: Iterable[str]) -> list[EndDescriptor]:
    view = SeparatedView(o, s)
    return [EndDescriptor(view.s, lab) for lab in view.infinite_labels()]


def end_refinement(o: GraphOracle, s: Iterable[str], s_bigger: Iterable[str]) -> dict[EndDescriptor, EndDescriptor]:
    """Map each end descriptor of ``G - s_bigger`` to the one of ``G - s``
    whose component contains it."""
    s, s_bigger = frozenset(s), frozenset(s_bigger)
    if not s <= s_bigger:
        raise InputError("refinement needs s to be contained in s_bigger")
    coarse = SeparatedView(o, s)
    out = {}
    for d in end_descriptors(o, s_bigger):
        lab = coarse.label(d.anchor)
        if lab is None or not coarse.is_infinite(lab):
            raise InputError(f"descriptor anchored at {d.anchor!r} escapes the coarse view")
        out[d] = EndDescriptor(s, lab)
    return out
