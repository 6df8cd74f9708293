"""Cycle surgery that absorbs one neighbour ``v`` of a cycle.

Three shapes, tried in this order:

``TYPE1``
    ``v`` is adjacent to a cycle edge ``u x``: replace it by ``u v x``.
``TYPE2_1``
    ``v`` and ``x`` (a cycle neighbour of the base ``u``) share a neighbour
    ``w`` off the cycle: replace ``u x`` by ``u v w x``.
``TYPE2_2``
    the shared neighbour ``w`` is on the cycle and its cycle neighbours are
    adjacent: route ``u v w x`` and close the gap with ``w- w+``.

``u x`` is the *foundation*; ``side`` says whether ``x`` is the successor or
the predecessor of ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import ExtensionUnavailable, HypothesisViolation, InputError
from .graph import OrientedCycle, bfs_distances, make_edge

TYPE1 = "TYPE1"
TYPE2_1 = "TYPE2_1"
TYPE2_2 = "TYPE2_2"
SUCC = "succ"
PRED = "pred"


class WorkingCycle:
    """Mutable cycle as successor/predecessor maps."""

    __slots__ = ("succ", "pred", "start")

    def __init__(self, vertices: Iterable[str]):
        seq = list(vertices)
        if len(seq) < 3 or len(set(seq)) != len(seq):
            raise InputError("a cycle needs at least three distinct vertices")
        self.succ = {seq[i - 1]: seq[i] for i in range(len(seq))}
        self.pred = {seq[i]: seq[i - 1] for i in range(len(seq))}
        self.start = seq[0]

    @classmethod
    def of(cls, c) -> "WorkingCycle":
        return cls(c.vertices if isinstance(c, OrientedCycle) else c)

    def copy(self) -> "WorkingCycle":
        out = WorkingCycle.__new__(WorkingCycle)
        out.succ = dict(self.succ)
        out.pred = dict(self.pred)
        out.start = self.start
        return out

    def __contains__(self, v) -> bool:
        return v in self.succ

    def __len__(self) -> int:
        return len(self.succ)

    def successor(self, u: str) -> str:
        return self.succ[u]

    def predecessor(self, u: str) -> str:
        return self.pred[u]

    def sequence(self, start: str | None = None) -> list[str]:
        if start is None:
            start = self.start if self.start in self.succ else min(self.succ)
        out = [start]
        v = self.succ[start]
        while v != start:
            out.append(v)
            v = self.succ[v]
        return out

    def to_cycle(self) -> OrientedCycle:
        return OrientedCycle(self.sequence())

    def vertex_set(self) -> frozenset:
        return frozenset(self.succ)

    def edges(self) -> set:
        return {make_edge(a, b) for a, b in self.succ.items()}

    def incident(self, v: str) -> tuple:
        return (make_edge(self.pred[v], v), make_edge(v, self.succ[v]))

    def link(self, a: str, b: str) -> None:
        """Make ``b`` the successor of ``a``."""
        self.succ[a] = b
        self.pred[b] = a

    def drop(self, v: str) -> None:
        del self.succ[v]
        del self.pred[v]


@dataclass(frozen=True)
class ExtensionRecord:
    kind: str
    target: str
    base: str
    far: str
    side: str
    w: str | None = None
    w_prev: str | None = None
    w_next: str | None = None

    @property
    def foundation(self):
        return make_edge(self.base, self.far)

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "target": self.target, "base": self.base,
               "foundation": list(self.foundation), "far": self.far, "side": self.side}
        if self.w is not None:
            doc["w"] = self.w
        if self.kind == TYPE2_2:
            doc["w_prev"] = self.w_prev
            doc["w_next"] = self.w_next
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ExtensionRecord":
        return cls(doc["kind"], doc["target"], doc["base"], doc["far"], doc["side"],
                   doc.get("w"), doc.get("w_prev"), doc.get("w_next"))

    def removed_edges(self) -> set:
        out = {self.foundation}
        if self.kind == TYPE2_2:
            out |= {make_edge(self.w_prev, self.w), make_edge(self.w, self.w_next)}
        return out

    def added_edges(self) -> set:
        u, v, x, w = self.base, self.target, self.far, self.w
        if self.kind == TYPE1:
            return {make_edge(u, v), make_edge(v, x)}
        out = {make_edge(u, v), make_edge(v, w), make_edge(w, x)}
        if self.kind == TYPE2_2:
            out.add(make_edge(self.w_prev, self.w_next))
        return out


def find_extension(o, c, v: str, base_filter: Callable[[str], bool] | None = None,
                   forbidden_w=None) -> ExtensionRecord:
    """Canonical ``v``-extension of ``c`` (OrientedCycle or WorkingCycle).

    Preference: TYPE1, then TYPE2_1, then TYPE2_2; within a type the
    smallest admissible base, successor side first, smallest ``w``.
    Raises HypothesisViolation when a claw or a paw without common
    neighbour blocks every base, ExtensionUnavailable when only the filters
    do.
    """
    if v in c:
        raise InputError(f"target {v!r} is already on the cycle")
    nb_v = o.neighbors(v)
    set_v = set(nb_v)
    bases = [u for u in nb_v if u in c]
    if not bases:
        raise InputError(f"target {v!r} has no neighbour on the cycle")
    if base_filter is not None:
        bases = [u for u in bases if base_filter(u)]
        if not bases:
            raise ExtensionUnavailable(f"no base of {v!r} passes the filter", "base_filter")
    succ, pred = c.successor, c.predecessor
    for u in bases:
        x = succ(u)
        if x in set_v:
            return ExtensionRecord(TYPE1, v, u, x, SUCC)
        x = pred(u)
        if x in set_v:
            return ExtensionRecord(TYPE1, v, u, x, PRED)

    claw = phi = None
    filtered = False
    second: ExtensionRecord | None = None
    for u in bases:
        up, um = succ(u), pred(u)
        if um not in o.neighbors(up):
            if claw is None:
                claw = (u, tuple(sorted((um, up, v))))
            continue
        paw = (um, u, up, v)
        any_common = False
        for side, x in ((SUCC, up), (PRED, um)):
            common = [z for z in o.neighbors(x) if z in set_v and z not in paw]
            if common:
                any_common = True
            for w in common:
                if forbidden_w is not None and w in forbidden_w:
                    filtered = True
                    continue
                if w not in c:
                    return ExtensionRecord(TYPE2_1, v, u, x, side, w)
                if second is None:
                    wm, wp = pred(w), succ(w)
                    if wp in o.neighbors(wm):
                        second = ExtensionRecord(TYPE2_2, v, u, x, side, w, wm, wp)
                    else:
                        filtered = True
        if not any_common and phi is None:
            b1, b2 = sorted((um, up))
            phi = (u, v, b1, b2)
    if second is not None:
        return second
    if claw is not None:
        from .forbidden import ClawWitness
        raise HypothesisViolation(f"claw centred at base {claw[0]!r}", "claw", ClawWitness(claw[0], claw[1]))
    if phi is not None and not filtered:
        from .forbidden import PawWitness
        raise HypothesisViolation(f"paw at base {phi[0]!r} has no common neighbour", "phi", PawWitness(*phi))
    raise ExtensionUnavailable(f"every extension of {v!r} is excluded by the filters", "filters")


def apply_record(wc: WorkingCycle, rec: ExtensionRecord) -> None:
    """Perform ``rec`` on the working cycle in place."""
    u, v, x, w = rec.base, rec.target, rec.far, rec.w
    if u not in wc or v in wc:
        raise InputError("extension record does not match the cycle")
    if rec.side == SUCC:
        fwd, bwd = wc.succ, wc.pred
    elif rec.side == PRED:
        fwd, bwd = wc.pred, wc.succ
    else:
        raise InputError(f"bad side {rec.side!r}")
    if fwd[u] != x:
        raise InputError("foundation is not a cycle edge at the base")

    def link(a, b):
        fwd[a] = b
        bwd[b] = a

    if rec.kind == TYPE1:
        link(u, v)
        link(v, x)
    elif rec.kind == TYPE2_1:
        if w in wc:
            raise InputError("type 2.1 needs w off the cycle")
        link(u, v)
        link(v, w)
        link(w, x)
    elif rec.kind == TYPE2_2:
        if w not in wc or (wc.pred[w], wc.succ[w]) != (rec.w_prev, rec.w_next):
            raise InputError("type 2.2 record does not match the cycle around w")
        wm, wp = bwd[w], fwd[w]
        link(wm, wp)
        link(u, v)
        link(v, w)
        link(w, x)
    else:
        raise InputError(f"unknown extension kind {rec.kind!r}")


def apply_extension(c: OrientedCycle, rec: ExtensionRecord) -> OrientedCycle:
    """The extended cycle, read from the same start vertex as ``c``."""
    wc = WorkingCycle.of(c)
    apply_record(wc, rec)
    return wc.to_cycle()


def extension_problems(o, before, after, rec: ExtensionRecord) -> list[str]:
    """Check the vertex sandwich and the distance-2 locality of altered
    edges; returns a list of failures (empty when fine)."""
    vb = set(before.vertices if isinstance(before, OrientedCycle) else before.vertex_set())
    va = set(after.vertices if isinstance(after, OrientedCycle) else after.vertex_set())
    out = []
    lower = vb | {rec.target}
    upper = lower | ({rec.w} if rec.w else set())
    if not lower <= va:
        out.append("lost a vertex")
    if not va <= upper:
        out.append("gained an unexpected vertex")
    eb = before.edges() if isinstance(before, OrientedCycle) else before.edges()
    ea = after.edges() if isinstance(after, OrientedCycle) else after.edges()
    near = bfs_distances(o, [rec.target], 2)
    for a, b in set(eb) ^ set(ea):
        if a not in near and b not in near:
            out.append(f"edge {a}-{b} changed away from the target")
    return out
