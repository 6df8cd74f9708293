"""Staged cycle growth around an umbrella.

Given a cycle ``C`` and an umbrella (blocker ``S_1 .. S_k``, finite side
``K0``, infinite sides ``K_1 .. K_k``):

1. :func:`extend_to_k0` grows ``C`` to exactly ``V(K0)``;
2. :func:`build_promising` enters every ``K_j`` through two vertices of
   ``S_j`` and absorbs ``N_3(S_j) ∩ V(K_j)``, keeping each cut
   ``δ(S_j ∪ V(K_j))`` crossed by exactly two cycle edges;
3. :func:`build_good` absorbs the rest of the blocker, moving single
   vertices in and out of the cut sets so that each cut is still crossed
   exactly twice.

The sets ``M_j`` are infinite; they are stored as ``S_j ∪ V(K_j)`` plus
finite ``added``/``removed`` deltas.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .errors import ImpossibleCase, InputError, InvariantViolation, ResourceCapExceeded
from .extension import TYPE1, TYPE2_1, TYPE2_2, ExtensionRecord, WorkingCycle, apply_record, find_extension
from .graph import OrientedCycle, bfs_distances, make_edge
from .separators import Umbrella, three_neighborhood_targets

DEFAULT_CAP = 16


class Membership:
    """The sets ``M_1 .. M_k`` of one umbrella."""

    def __init__(self, u: Umbrella):
        self.u = u
        self.k = u.k
        self.s_index = {s: j for j, p in enumerate(u.parts) for s in p.S}
        self.label_index = {p.K.label: j for j, p in enumerate(u.parts)}
        self.added = [set() for _ in range(self.k)]
        self.removed = [set() for _ in range(self.k)]
        self.extra: dict[str, set] = {}
        self._base: dict[str, int | None] = {}

    def base_owner(self, v: str) -> int | None:
        try:
            return self._base[v]
        except KeyError:
            pass
        j = self.s_index.get(v)
        if j is None and v not in self.u.blocker:
            j = self.label_index.get(self.u.view.label(v))
        self._base[v] = j
        return j

    def contains(self, j: int, v: str) -> bool:
        if v in self.added[j]:
            return True
        if v in self.removed[j]:
            return False
        return self.base_owner(v) == j

    def owners(self, v: str) -> set:
        out = set()
        b = self.base_owner(v)
        if b is not None and v not in self.removed[b]:
            out.add(b)
        ex = self.extra.get(v)
        if ex:
            out |= ex
        return out

    def add(self, j: int, v: str) -> None:
        if self.contains(j, v):
            return
        if v in self.removed[j]:
            self.removed[j].discard(v)
        else:
            self.added[j].add(v)
            self.extra.setdefault(v, set()).add(j)

    def remove(self, j: int, v: str) -> None:
        if not self.contains(j, v):
            return
        if v in self.added[j]:
            self.added[j].discard(v)
            self.extra[v].discard(j)
        else:
            self.removed[j].add(v)

    def delta_json(self, j: int) -> dict:
        return {"added": sorted(self.added[j]), "removed": sorted(self.removed[j])}

    def copy(self) -> "Membership":
        out = Membership.__new__(Membership)
        out.u, out.k = self.u, self.k
        out.s_index, out.label_index = self.s_index, self.label_index
        out.added = [set(a) for a in self.added]
        out.removed = [set(r) for r in self.removed]
        out.extra = {v: set(s) for v, s in self.extra.items()}
        out._base = self._base
        return out


class CutTracker:
    """Cycle edges in each ``δ(M_j)``, updated around local changes."""

    def __init__(self, wc: WorkingCycle, mem: Membership):
        self.wc = wc
        self.mem = mem
        self.crossing = [set() for _ in range(mem.k)]
        for a, b in wc.succ.items():
            self._add(a, b)
        self._pending: set = set()

    def _parts(self, a: str, b: str) -> set:
        return self.mem.owners(a) ^ self.mem.owners(b)

    def _add(self, a: str, b: str) -> set:
        parts = self._parts(a, b)
        e = make_edge(a, b)
        for j in parts:
            self.crossing[j].add(e)
        return parts

    def _incident(self, vertices) -> set:
        wc = self.wc
        out = set()
        for v in vertices:
            if v in wc:
                out.add((wc.pred[v], v))
                out.add((v, wc.succ[v]))
        return out

    def begin(self, affected) -> None:
        touched = set()
        for a, b in self._incident(affected):
            e = make_edge(a, b)
            for j in self.mem.owners(a) | self.mem.owners(b):
                self.crossing[j].discard(e)
                touched.add(j)
        self._pending = touched

    def end(self, affected) -> set:
        touched = self._pending
        for a, b in self._incident(affected):
            touched |= self._add(a, b)
            touched |= self.mem.owners(a) | self.mem.owners(b)
        self._pending = set()
        return touched

    def count(self, j: int) -> int:
        return len(self.crossing[j])


@dataclass
class _State:
    o: object
    u: Umbrella
    wc: WorkingCycle
    cap: int = DEFAULT_CAP
    mem: Membership | None = None
    tracker: CutTracker | None = None
    active: set = field(default_factory=set)  # parts whose cut is already crossed twice
    steps: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    deadline: float | None = None

    def tick(self) -> None:
        if self.deadline is not None and len(self.steps) % 256 == 0 and time.monotonic() > self.deadline:
            raise ResourceCapExceeded(f"time budget exhausted after {len(self.steps)} steps")

    def snapshot(self, **extra) -> dict:
        doc = {"cycle_length": len(self.wc), "active_parts": sorted(self.active),
               "last_steps": self.steps[-3:]}
        doc.update(extra)
        return doc


def _near(o, v: str) -> set:
    return set(bfs_distances(o, [v], 2))


def _check_local(st: _State, rec: ExtensionRecord, before_len: int) -> None:
    near = _near(st.o, rec.target)
    for a, b in rec.removed_edges() | rec.added_edges():
        if a not in near and b not in near:
            raise InvariantViolation("extension changed an edge away from the target", witness=[a, b])
    grown = len(st.wc) - before_len
    if grown not in ((1,) if rec.kind != TYPE2_1 else (2,)):
        raise InvariantViolation("extension broke the vertex sandwich", witness=rec.to_json())


def _check_cuts(st: _State, parts) -> None:
    if st.tracker is None:
        return
    for j in parts:
        want = 2 if j in st.active else 0
        got = st.tracker.count(j)
        if got != want:
            raise ImpossibleCase(f"cut of part {j} is crossed {got} times, expected {want}",
                                 st.snapshot(part=j, crossing=sorted(st.tracker.crossing[j])))


def _extend(st: _State, rec: ExtensionRecord, phase: str, **info) -> set:
    """Apply one extension, keep the cut bookkeeping and log it."""
    affected = {rec.base, rec.far, rec.target}
    if rec.w is not None:
        affected.add(rec.w)
    if rec.kind == TYPE2_2:
        affected |= {rec.w_prev, rec.w_next}
    before = len(st.wc)
    if st.tracker is not None:
        st.tracker.begin(affected)
    apply_record(st.wc, rec)
    touched = st.tracker.end(affected) if st.tracker is not None else set()
    _check_local(st, rec, before)
    entry = {"phase": phase, "record": rec.to_json()}
    entry.update(info)
    st.steps.append(entry)
    st.tick()
    return touched


def _orient(wc: WorkingCycle, a: str, b: str):
    """(fwd, bwd) maps in which ``b`` follows ``a``."""
    if wc.succ[a] == b:
        return wc.succ, wc.pred
    if wc.pred[a] == b:
        return wc.pred, wc.succ
    raise InputError(f"{a!r} and {b!r} are not consecutive on the cycle")


def _splice(st: _State, a: str, b: str, drop: list, inner: list, phase: str, **info) -> set:
    """Replace the cycle path ``a, drop..., b`` (``drop[0]`` follows ``a``)
    by ``a, inner..., b``."""
    wc = st.wc
    affected = {a, b, *drop, *inner}
    if st.tracker is not None:
        st.tracker.begin(affected)
    nxt = drop[0] if drop else b
    fwd, bwd = _orient(wc, a, nxt)
    for v in drop:
        wc.drop(v)
    seq = [a, *inner, b]
    for p, q in zip(seq, seq[1:]):
        fwd[p] = q
        bwd[q] = p
    touched = st.tracker.end(affected) if st.tracker is not None else set()
    st.steps.append({"phase": phase, "splice": {"from": a, "to": b, "dropped": list(drop), "path": list(inner)}, **info})
    return touched


def _inner_path(st: _State, part: int, a: str, b: str, free=frozenset()) -> list:
    """Shortest ``a``-``b`` path whose inner vertices lie in ``K_part`` and
    off the cycle (vertices in ``free`` may be reused); returns the inner
    vertices."""
    o, wc, handle = st.o, st.wc, st.u.parts[part].K
    target_nb = set(o.neighbors(b))
    parent = {a: None}
    dist = {a: 0}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if dist[x] > st.cap:
            break
        for y in o.neighbors(x):
            if y in parent or not handle.contains(y) or (y in wc and y not in free):
                continue
            parent[y] = x
            dist[y] = dist[x] + 1
            if y in target_nb:
                path = []
                z = y
                while z != a:
                    path.append(z)
                    z = parent[z]
                return path[::-1]
            queue.append(y)
    raise ResourceCapExceeded(f"no path inside component {part} between {a!r} and {b!r} within radius {st.cap}")


def _protected_edges(o, c, k0: frozenset) -> set:
    """Edges of ``c`` with both ends in ``K0`` at distance more than 3 from
    the open neighbourhood of ``c``."""
    cv = set(c.vertices) if isinstance(c, OrientedCycle) else set(c.vertex_set())
    boundary = {y for v in cv for y in o.neighbors(v) if y not in cv}
    near = bfs_distances(o, boundary, 3) if boundary else {}
    edges = c.edges()
    return {e for e in edges if e[0] in k0 and e[1] in k0 and e[0] not in near and e[1] not in near}


def _check_stability(st: _State, protected: set, stage: str) -> None:
    have = st.wc.edges()
    lost = sorted(protected - have)
    if lost:
        raise InvariantViolation(f"{stage} dropped a protected edge", witness=lost[:5])


# ------------------------------------------------------------------ K0 phase

def _fill_k0(st: _State) -> None:
    u, o, wc = st.u, st.o, st.wc
    k0 = u.k0
    dist = bfs_distances(k0, [v for v in wc.succ if v in k0])
    order = sorted(dist, key=lambda v: (dist[v], v))
    for v in order:
        if v in wc:
            continue
        size = len(wc)
        rec = find_extension(o, wc, v)
        if rec.kind == TYPE2_1 and rec.w in u.blocker:
            # the common neighbour lies on a separator whose K0-side
            # neighbourhood is a clique, so a TYPE1 move was available
            raise ImpossibleCase("type 2.1 step reaches the blocker while filling K0",
                                 st.snapshot(record=rec.to_json()))
        _extend(st, rec, "K0")
        if len(wc) <= size:
            raise InvariantViolation("cycle did not grow")


def extend_to_k0(o, c, u: Umbrella) -> OrientedCycle:
    """Extension of ``c`` whose vertex set is exactly ``V(K0)``."""
    k0 = u.k0_vertices()
    if not set(c.vertices) <= k0:
        raise InputError("cycle is not inside K0")
    st = _State(o, u, WorkingCycle.of(c))
    protected = _protected_edges(o, c, k0)
    _fill_k0(st)
    if st.wc.vertex_set() != k0:
        raise InvariantViolation("cycle does not span K0")
    _check_stability(st, protected, "K0 phase")
    return st.wc.to_cycle()


# ------------------------------------------------------------ promising phase

@dataclass
class PromisingTuple:
    cycle: OrientedCycle
    umbrella: Umbrella
    membership: Membership
    crossing: list
    steps: list
    notes: list
    _working: WorkingCycle | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "cycle": self.cycle.to_json(),
            "parts": [{"S": sorted(p.S), "crossing": sorted(map(list, self.crossing[j]))}
                      for j, p in enumerate(self.umbrella.parts)],
            "notes": self.notes,
        }


def _v_prime_step(st: _State, j: int, v: str, case: str) -> None:
    o, u = st.o, st.u
    handle = u.parts[j].K
    inside = [y for y in o.neighbors(v) if handle.contains(y)]
    if not inside:
        raise ImpossibleCase(f"separator vertex {v!r} has no neighbour in its component", st.snapshot())
    v2 = inside[0]
    rec = find_extension(o, st.wc, v2)
    if rec.kind == TYPE1:
        st.notes.append({"part": j, "case": case,
                         "note": f"{v2} joined by a type 1 step where a type 2.1 step was expected"})
    elif not (rec.kind == TYPE2_1 and rec.w in u.parts[j].S):
        raise ImpossibleCase("second step into the component is not a type 2.1 step through S_j",
                             st.snapshot(record=rec.to_json(), part=j))
    st.active.add(j)
    touched = _extend(st, rec, "enter", part=j, case=case + "/second")
    _check_cuts(st, touched | {j})


def _enter_part(st: _State, j: int) -> None:
    o, u, wc, mem = st.o, st.u, st.wc, st.mem
    S_j = u.parts[j].S
    v = min(S_j)
    k0 = u.k0_vertices()
    rec = find_extension(o, wc, v)
    if rec.kind == TYPE1:
        st.active.add(j)
        touched = _extend(st, rec, "enter", part=j, case="1")
        _check_cuts(st, touched | {j})
        _v_prime_step(st, j, v, "1")
        return
    rec = find_extension(o, wc, v, base_filter=k0.__contains__)
    if rec.kind == TYPE1:
        raise ImpossibleCase("type 1 step appeared only after restricting the base", st.snapshot())
    if rec.kind == TYPE2_2:
        st.active.add(j)
        touched = _extend(st, rec, "enter", part=j, case="3")
        _check_cuts(st, touched | {j})
        _v_prime_step(st, j, v, "3")
        return
    w = rec.w
    if w in S_j:
        st.active.add(j)
        _extend(st, rec, "enter", part=j, case="2.1")
        inner = _inner_path(st, j, v, w)
        touched = _splice(st, v, w, [], inner, "enter", part=j, case="2.1/path")
        _check_cuts(st, touched | {j})
        return
    i = mem.s_index.get(w)
    if i is None:
        raise ImpossibleCase(f"type 2.1 common neighbour {w!r} is off the blocker", st.snapshot(record=rec.to_json()))
    r = rec.far
    if r not in u.parts[i].S:
        raise ImpossibleCase("foundation end outside S_i with w in S_i", st.snapshot(record=rec.to_json(), part=i))
    if i not in st.active:
        raise ImpossibleCase("foundation touches a part that was not entered yet", st.snapshot(part=i))
    on = sorted(s for s in u.parts[i].S if s in wc)
    if len(on) != 2 or r not in on:
        raise ImpossibleCase("part is not met in exactly two separator vertices", st.snapshot(part=i, on=on))
    s = on[0] if on[1] == r else on[1]
    st.active.add(j)
    touched = _extend(st, rec, "enter", part=j, case="2.2.2")
    # walk from w away from v along r, Q, s
    fwd, _ = _orient(wc, w, r)
    drop = []
    x = r
    while x != s:
        drop.append(x)
        x = fwd[x]
        if x != s and mem.base_owner(x) != i:
            raise ImpossibleCase("path between the two separator vertices leaves K_i",
                                 st.snapshot(part=i, vertex=x))
    inner = _inner_path(st, i, w, s, free=frozenset(drop))
    touched |= _splice(st, w, s, drop, inner, "enter", part=j, case="2.2.2/reroute", rerouted=i)
    _check_cuts(st, touched | {i, j})
    _v_prime_step(st, j, v, "2.2.2")


def _part_conditions(st: _State, entered: set) -> list:
    """Conditions (i)-(v) on the current cycle; returns the failures."""
    u, wc, mem = st.u, st.wc, st.mem
    out = []
    if not u.k0_vertices() <= wc.vertex_set():
        out.append("K0 not covered")
    seen_k = set()
    for v in wc.succ:
        b = mem.base_owner(v)
        if b is not None and v not in u.blocker:
            seen_k.add(b)
        if b is not None and b not in entered:
            out.append(f"cycle meets part {b} before it was entered")
    for j, p in enumerate(u.parts):
        if j not in entered:
            continue
        if j not in seen_k:
            out.append(f"cycle misses K_{j}")
        on = [s for s in p.S if s in wc]
        if len(on) != 2:
            out.append(f"cycle meets S_{j} in {len(on)} vertices")
        for s in on:
            if wc.succ[s] in p.S or wc.pred[s] in p.S:
                out.append(f"cycle uses an edge inside S_{j}")
        if st.tracker.count(j) != 2:
            out.append(f"cut of part {j} crossed {st.tracker.count(j)} times")
    return out


def _grow_in(st: _State, targets: list) -> None:
    o, u, wc, mem = st.o, st.u, st.wc, st.mem
    seeds: dict[int, list] = {j: [] for j in range(u.k)}
    for v in wc.succ:
        b = mem.base_owner(v)
        if b is not None and v not in u.blocker:
            seeds[b].append(v)
    for j, p in enumerate(u.parts):
        want = {t for t in targets[j] if t not in wc}
        if not want:
            continue
        handle = p.K
        dist = {v: 0 for v in sorted(seeds[j])}
        parent = {v: None for v in dist}
        queue = deque(sorted(seeds[j]))
        missing = set(want) - set(dist)
        while queue and missing:
            x = queue.popleft()
            if dist[x] >= st.cap:
                raise ResourceCapExceeded(f"component {j}: targets farther than radius {st.cap} from the cycle")
            for y in o.neighbors(x):
                if y in dist or not handle.contains(y):
                    continue
                dist[y] = dist[x] + 1
                parent[y] = x
                missing.discard(y)
                queue.append(y)
        if missing:
            raise ImpossibleCase(f"targets of part {j} not reachable inside its component", st.snapshot(part=j))
        needed = set()
        for t in want:
            z = t
            while z is not None and z not in needed:
                needed.add(z)
                z = parent[z]
        order = sorted(needed, key=lambda v: (dist[v], v))

        def in_part(x, j=j):
            return mem.contains(j, x)

        for v in order:
            if v in wc:
                continue
            rec = find_extension(o, wc, v, base_filter=in_part)
            case = None
            if rec.kind == TYPE2_2:
                a, b = mem.contains(j, rec.w_prev), mem.contains(j, rec.w_next)
                if not a and not b:
                    raise ImpossibleCase("both cycle neighbours of w lie outside M_j",
                                         st.snapshot(part=j, record=rec.to_json()))
                case = "a" if a and b else "c"
            touched = _extend(st, rec, "grow", part=j, case=case)
            _check_cuts(st, touched)


def build_promising(o, c, u: Umbrella, *, cap: int = DEFAULT_CAP, deadline: float | None = None) -> PromisingTuple:
    """Promising tuple for the umbrella ``u`` around the cycle ``c``."""
    if cap < 4:
        raise ResourceCapExceeded(f"working radius cap {cap} is below 4")
    k0 = u.k0_vertices()
    if not set(c.vertices) <= k0:
        raise InputError("cycle is not inside K0")
    st = _State(o, u, WorkingCycle.of(c), cap=cap, deadline=deadline)
    protected = _protected_edges(o, c, k0)
    _fill_k0(st)
    if st.wc.vertex_set() != k0:
        raise InvariantViolation("cycle does not span K0")
    st.mem = Membership(u)
    st.tracker = CutTracker(st.wc, st.mem)
    _check_cuts(st, range(u.k))
    for j in range(u.k):
        _enter_part(st, j)
        problems = _part_conditions(st, st.active) if u.k <= 64 or j == u.k - 1 else []
        if problems:
            raise ImpossibleCase(f"entering part {j} broke: {problems[0]}", st.snapshot(problems=problems[:10]))
    targets = three_neighborhood_targets(o, u)
    _grow_in(st, targets)
    _check_cuts(st, range(u.k))
    _check_stability(st, protected, "promising phase")
    pt = PromisingTuple(st.wc.to_cycle(), u, st.mem, [set(x) for x in st.tracker.crossing],
                        st.steps, st.notes, st.wc)
    problems = promising_problems(o, pt, targets)
    if problems:
        raise InvariantViolation(f"promising tuple invalid: {problems[0]}", witness=problems)
    return pt


def promising_problems(o, pt: PromisingTuple, targets=None) -> list:
    u = pt.umbrella
    out = []
    wc = WorkingCycle.of(pt.cycle)
    for a, b in wc.succ.items():
        if b not in o.neighbors(a):
            out.append(f"non-edge {a}-{b} on the cycle")
            break
    have = wc.vertex_set()
    if not u.k0_vertices() <= have:
        out.append("K0 not covered")
    if targets is None:
        targets = three_neighborhood_targets(o, u)
    for j, t in enumerate(targets):
        if not t <= have:
            out.append(f"N_3(S_{j}) inside K_{j} not covered")
    fresh = CutTracker(wc, Membership(u))
    for j in range(u.k):
        if fresh.count(j) != 2:
            out.append(f"cut of part {j} crossed {fresh.count(j)} times")
    return out


# ----------------------------------------------------------------- good phase

ROWS = {
    (True, True): "union v,w",
    (True, False): "minus w, union v",
    (False, True): "minus v, union w",
    (False, False): "minus v,w",
}


@dataclass
class GoodTuple:
    cycle: OrientedCycle
    umbrella: Umbrella
    membership: Membership
    crossing: list
    steps: list

    def parts_json(self) -> list:
        return [{"S": sorted(p.S), "anchor": p.K.anchor, "M_delta": self.membership.delta_json(j),
                 "crossing": sorted(map(list, self.crossing[j]))}
                for j, p in enumerate(self.umbrella.parts)]


def _update_sets(mem: Membership, rec: ExtensionRecord) -> list:
    """Apply the membership table for ``rec``; returns the rows used."""
    v, u, x, w = rec.target, rec.base, rec.far, rec.w
    involved = mem.owners(u) | mem.owners(x) | mem.owners(v)
    if w is not None:
        involved |= mem.owners(w)
    plan = []
    for r in sorted(involved):
        ur, xr = mem.contains(r, u), mem.contains(r, x)
        if rec.kind == TYPE1:
            plan.append((r, "union v" if (ur or xr) else "minus v", ur or xr))
        else:
            plan.append((r, ROWS[(ur, xr)], (ur, xr)))
    for r, row, key in plan:
        if rec.kind == TYPE1:
            (mem.add if key else mem.remove)(r, v)
        else:
            ur, xr = key
            if ur and xr:
                mem.add(r, v)
                mem.add(r, w)
            elif ur:
                mem.remove(r, w)
                mem.add(r, v)
            elif xr:
                mem.remove(r, v)
                mem.add(r, w)
            else:
                mem.remove(r, v)
                mem.remove(r, w)
    return [{"part": r, "row": row} for r, row, _ in plan]


def build_good(o, p: PromisingTuple, u: Umbrella, c_orig, *, cap: int = DEFAULT_CAP,
               deadline: float | None = None) -> GoodTuple:
    """Good tuple from a promising one: absorb ``blocker - V(D)``."""
    wc = p._working.copy() if p._working is not None else WorkingCycle.of(p.cycle)
    st = _State(o, u, wc, cap=cap, deadline=deadline)
    st.mem = p.membership.copy()
    st.tracker = CutTracker(wc, st.mem)
    st.active = set(range(u.k))
    _check_cuts(st, range(u.k))
    k0 = u.k0_vertices()
    protected = _protected_edges(o, c_orig, k0)
    todo = sorted(s for s in u.blocker if s not in wc)
    limit = len(todo)
    count = 0
    for v in todo:
        if v in wc:
            continue
        rec = find_extension(o, wc, v)
        crossed_before = [r for r in range(u.k) if rec.foundation in st.tracker.crossing[r]] \
            if rec.kind != TYPE1 else []
        affected = {rec.base, rec.far, v}
        if rec.w is not None:
            affected.add(rec.w)
        if rec.kind == TYPE2_2:
            affected |= {rec.w_prev, rec.w_next}
        before = len(wc)
        touched_parts = set()
        for a in affected:
            touched_parts |= st.mem.owners(a)
        st.tracker.begin(affected)
        apply_record(wc, rec)
        rows = _update_sets(st.mem, rec)
        touched = st.tracker.end(affected) | touched_parts
        for a in affected:
            touched |= st.mem.owners(a)
        _check_local(st, rec, before)
        count += 1
        st.steps.append({"phase": "good", "record": rec.to_json(), "rows": rows})
        st.tick()
        _check_cuts(st, touched)
        vw = make_edge(v, rec.w) if rec.w is not None else None
        for r in crossed_before:
            if vw not in st.tracker.crossing[r] or rec.foundation in wc.edges():
                raise ImpossibleCase("cut accounting failed after a type 2 step",
                                     st.snapshot(part=r, record=rec.to_json()))
    if count > limit:
        raise InvariantViolation("more steps than missing blocker vertices")
    _check_cuts(st, range(u.k))
    _check_stability(st, protected, "good phase")
    gt = GoodTuple(wc.to_cycle(), u, st.mem, [set(x) for x in st.tracker.crossing], st.steps)
    problems = good_problems(o, gt)
    if problems:
        raise InvariantViolation(f"good tuple invalid: {problems[0]}", witness=problems)
    gt._steps_used = count
    return gt


def good_problems(o, gt: GoodTuple, targets=None) -> list:
    """Properties (1)-(3) of a good tuple, recomputed from scratch."""
    u, mem = gt.umbrella, gt.membership
    out = []
    wc = WorkingCycle.of(gt.cycle)
    for a, b in wc.succ.items():
        if b not in o.neighbors(a):
            out.append(f"non-edge {a}-{b} on the cycle")
            break
    have = wc.vertex_set()
    if not u.k0_vertices() <= have:
        out.append("K0 not covered")
    if not u.blocker <= have:
        out.append("blocker not covered")
    if targets is None:
        targets = three_neighborhood_targets(o, u)
    for j, t in enumerate(targets):
        if not t <= have:
            out.append(f"N_3(S_{j}) inside K_{j} not covered")
    near_blocker = set(u.blocker)
    for s in u.blocker:
        near_blocker.update(o.neighbors(s))
    for j, p in enumerate(u.parts):
        for v in mem.removed[j]:
            if p.K.contains(v) and not any(s in p.S for s in o.neighbors(v)):
                out.append(f"M_{j} lost {v}, which is not next to S_{j}")
        for v in mem.added[j]:
            if not (p.K.contains(v) or v in near_blocker):
                out.append(f"M_{j} gained {v}, which is far from the blocker")
    fresh = CutTracker(wc, mem)
    for j in range(u.k):
        if fresh.count(j) != 2:
            out.append(f"cut of part {j} crossed {fresh.count(j)} times")
    return out
