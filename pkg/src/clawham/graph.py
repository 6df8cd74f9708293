"""Explicit finite graphs and oriented cycles.

Vertices are strings (tokens).  Every iteration order in the package comes
from sorting tokens, so results are reproducible run to run.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InputError

Edge = tuple  # (a, b) with a < b


def make_edge(a: str, b: str) -> Edge:
    if a == b:
        raise InputError(f"loop at {a!r} is not an edge")
    return (a, b) if a < b else (b, a)


class FiniteGraph:
    """Immutable simple undirected graph over string tokens."""

    __slots__ = ("_adj", "_vertices", "_hash")

    def __init__(self, adjacency: Mapping[str, Iterable[str]]):
        adj: dict[str, set[str]] = {v: set(nbrs) for v, nbrs in adjacency.items()}
        for v, nbrs in adj.items():
            if v in nbrs:
                raise InputError(f"loop at {v!r}")
            for w in nbrs:
                if w not in adj:
                    raise InputError(f"neighbour {w!r} of {v!r} is not a vertex")
        for v, nbrs in adj.items():
            for w in nbrs:
                if v not in adj[w]:
                    raise InputError(f"asymmetric adjacency {v!r}->{w!r}")
        self._vertices = tuple(sorted(adj))
        self._adj = {v: tuple(sorted(adj[v])) for v in self._vertices}
        self._hash = None

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "FiniteGraph":
        adj: dict[str, set[str]] = {v: set() for v in vertices}
        for a, b in edges:
            if a == b:
                raise InputError(f"loop at {a!r}")
            for x in (a, b):
                if x not in adj:
                    raise InputError(f"edge endpoint {x!r} is not a vertex")
            adj[a].add(b)
            adj[b].add(a)
        return cls(adj)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    def neighbors(self, v: str) -> tuple[str, ...]:
        try:
            return self._adj[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._adj

    def has_edge(self, a: str, b: str) -> bool:
        nbrs = self._adj.get(a)
        return nbrs is not None and b in nbrs

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def edges(self) -> list[Edge]:
        return sorted((v, w) for v in self._vertices for w in self._adj[v] if v < w)

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGraph) and self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._adj.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteGraph(|V|={len(self._vertices)}, |E|={len(self.edges())})"

    def to_json(self) -> dict:
        return {"vertices": list(self._vertices), "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "FiniteGraph":
        try:
            vertices = [str(v) for v in doc["vertices"]]
            edges = [(str(a), str(b)) for a, b in doc["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph document: {exc}") from None
        if len(set(vertices)) != len(vertices):
            raise InputError("duplicate vertex tokens")
        seen = set()
        for a, b in edges:
            e = make_edge(a, b)
            if e in seen:
                raise InputError(f"parallel edge {e}")
            seen.add(e)
        return cls.from_edges(vertices, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _check_subset(g, x: Iterable[str]) -> frozenset[str]:
    x = frozenset(x)
    for v in x:
        if v not in g:
            raise InputError(f"unknown vertex {v!r}")
    return x


def induced_subgraph(g: FiniteGraph, x: Iterable[str]) -> FiniteGraph:
    x = _check_subset(g, x)
    return FiniteGraph({v: [w for w in g.neighbors(v) if w in x] for v in x})


def neighborhood(g, x: Iterable[str], i: int) -> frozenset[str]:
    """All vertices at distance at most ``i`` from ``x``.

    ``g`` may be a FiniteGraph or anything with ``neighbors``.
    """
    if i < 0:
        raise InputError("radius must be nonnegative")
    x = _check_subset(g, x) if isinstance(g, FiniteGraph) else frozenset(x)
    return frozenset(bfs_distances(g, x, i))


def bfs_distances(g, sources: Iterable[str], radius: int | None = None,
                  avoid: frozenset | set = frozenset()) -> dict[str, int]:
    dist = {}
    queue = deque()
    for s in sorted(sources):
        if s not in dist and s not in avoid:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if radius is not None and d >= radius:
            continue
        for w in g.neighbors(v):
            if w not in dist and w not in avoid:
                dist[w] = d + 1
                queue.append(w)
    return dist


def cut(g, m: Iterable[str]) -> frozenset[Edge]:
    """Edges with exactly one endpoint in ``m``."""
    m = _check_subset(g, m) if isinstance(g, FiniteGraph) else frozenset(m)
    return frozenset(make_edge(v, w) for v in m for w in g.neighbors(v) if w not in m)


def boundary(g, x: Iterable[str]) -> frozenset[str]:
    x = _check_subset(g, x) if isinstance(g, FiniteGraph) else frozenset(x)
    return frozenset(v for v in x if any(w not in x for w in g.neighbors(v)))


def components(g: FiniteGraph) -> list[tuple[str, ...]]:
    """Connected components, each sorted, ordered by smallest member."""
    seen: set[str] = set()
    parts = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = bfs_distances(g, [v])
        seen.update(comp)
        parts.append(tuple(sorted(comp)))
    return parts


def articulation_points(g: FiniteGraph) -> list[str]:
    """Cutvertices, found by an iterative low-point depth-first search."""
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    points: set[str] = set()
    counter = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        stack = [(root, None, iter(g.neighbors(root)))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(g.neighbors(w))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    points.add(parent)
        if root_children > 1:
            points.add(root)
    return sorted(points)


def is_connected(g: FiniteGraph) -> bool:
    return len(components(g)) == 1


def is_two_connected(g: FiniteGraph) -> bool:
    return len(g) >= 3 and is_connected(g) and not articulation_points(g)


def shortest_cycle_through(g, root: str, radius: int | None = None) -> "OrientedCycle | None":
    """Shortest cycle containing ``root`` (BFS branch labelling).

    ``g`` only needs ``neighbors``; ``radius`` bounds the search ball.  With
    a radius the ball grows one layer at a time: a search of radius ``r``
    sees every cycle of length at most ``2r + 1``, so it stops at the first
    radius that finds one that short.
    """
    if radius is None:
        return _cycle_within(g, root, None)[0]
    for r in range(1, radius + 1):
        c, closed = _cycle_within(g, root, r)
        if c is not None and (closed or len(c.vertices) <= 2 * r + 1):
            return c
        if closed:
            return None
    return _cycle_within(g, root, radius)[0]


def _cycle_within(g, root: str, radius: int | None):
    """Shortest cycle through ``root`` inside the radius ball, and whether
    the ball is the whole component."""
    dist = {root: 0}
    parent = {root: None}
    branch = {root: None}
    order = [root]
    queue = deque([root])
    closed = True
    while queue:
        v = queue.popleft()
        if radius is not None and dist[v] >= radius:
            if closed and any(w not in dist for w in g.neighbors(v)):
                closed = False
            continue
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                parent[w] = v
                branch[w] = w if v == root else branch[v]
                order.append(w)
                queue.append(w)
    best = None
    for a in order:
        if a == root:
            continue
        for b in g.neighbors(a):
            if b == root or b not in dist or b == parent[a] or a == parent.get(b):
                continue
            if branch[a] == branch[b]:
                continue
            length = dist[a] + dist[b] + 1
            key = (length, a, b)
            if best is None or key < best:
                best = key
    if best is None:
        return None, closed
    _, a, b = best
    left = []
    v = a
    while v is not None:
        left.append(v)
        v = parent[v]
    right = []
    v = b
    while v != root:
        right.append(v)
        v = parent[v]
    seq = list(reversed(left)) + right
    return OrientedCycle(seq), closed


@dataclass(frozen=True)
class OrientedCycle:
    """Cyclic sequence of distinct vertices, read in list order."""

    vertices: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, vertices: Iterable[str]):
        seq = tuple(vertices)
        if len(seq) < 3:
            raise InputError("a cycle needs at least three vertices")
        index = {v: i for i, v in enumerate(seq)}
        if len(index) != len(seq):
            raise InputError("cycle repeats a vertex")
        object.__setattr__(self, "vertices", seq)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def __iter__(self):
        return iter(self.vertices)

    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    def position(self, u: str) -> int:
        try:
            return self._index[u]
        except KeyError:
            raise InputError(f"vertex {u!r} is not on the cycle") from None

    def successor(self, u: str) -> str:
        return self.vertices[(self.position(u) + 1) % len(self.vertices)]

    def predecessor(self, u: str) -> str:
        return self.vertices[self.position(u) - 1]

    def segment(self, v: str, w: str) -> tuple[str, ...]:
        """The v-w path following the orientation, both ends included."""
        i, j = self.position(v), self.position(w)
        if j >= i:
            return self.vertices[i:j + 1]
        return self.vertices[i:] + self.vertices[:j + 1]

    def edges(self) -> frozenset[Edge]:
        seq = self.vertices
        return frozenset(make_edge(seq[i - 1], seq[i]) for i in range(len(seq)))

    def reversed(self) -> "OrientedCycle":
        return OrientedCycle(reversed(self.vertices))

    def to_json(self) -> list[str]:
        return list(self.vertices)


# Free-function spellings used across the package.
def cycle_successor(c: OrientedCycle, u: str) -> str:
    return c.successor(u)


def cycle_predecessor(c: OrientedCycle, u: str) -> str:
    return c.predecessor(u)


def cycle_segment(c: OrientedCycle, v: str, w: str) -> tuple[str, ...]:
    return c.segment(v, w)


def validate_cycle(g, c) -> tuple[bool, tuple | None]:
    """Check adjacency of consecutive vertices and distinctness.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    first non-adjacent consecutive pair or ``(v, v)`` for a repeated vertex.
    ``c`` may be an OrientedCycle or a plain sequence.
    """
    seq = tuple(c.vertices if isinstance(c, OrientedCycle) else c)
    seen = set()
    for v in seq:
        if v in seen:
            return False, (v, v)
        seen.add(v)
    if len(seq) < 3:
        return False, tuple(seq)
    for i in range(len(seq)):
        a, b = seq[i], seq[(i + 1) % len(seq)]
        try:
            ok = b in g.neighbors(a)
        except InputError:
            ok = False
        if not ok:
            return False, (a, b)
    return True, None
