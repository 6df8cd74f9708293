"""Stage loop: bootstrap cycle, then umbrella -> promising -> good per stage,
with an independent verifier that re-checks every stage from the trace.

Stage 0 holds ``C^0``.  Stage ``i >= 1`` holds the umbrella around
``V(C^{i-1})``, the sets ``M^i_j`` and the cycle ``C^i``.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from itertools import combinations

from .errors import ClawhamError, HypothesisViolation, InputError, ResourceCapExceeded
from .extension import TYPE2_1, ExtensionRecord, WorkingCycle, apply_record, find_extension
from .forbidden import check_preconditions
from .graph import OrientedCycle, bfs_distances, make_edge, shortest_cycle_through
from .oracle import FiniteOracle, GraphOracle, SeparatedView, build_oracle
from .separators import check_separator_facts, compute_umbrella, umbrella_from_parts, umbrella_problems
from .tuples import DEFAULT_CAP, build_good, build_promising

TRACE_FORMAT = "clawham-trace/1"


@dataclass
class RunParams:
    cap: int = DEFAULT_CAP
    check_radius: int = 4
    force: bool = False
    max_ends: int = 8
    time_budget: float | None = None  # seconds; None means unlimited

    def validate(self) -> None:
        if self.cap < 4:
            raise ResourceCapExceeded(f"working radius cap {self.cap} is below 4")
        if self.check_radius < 2:
            raise InputError("check radius must be at least 2")
        if self.max_ends < 1:
            raise InputError("max_ends must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise InputError("time budget must be positive")


def initial_cycle(o: GraphOracle, cap: int = DEFAULT_CAP) -> OrientedCycle:
    """Shortest cycle through the canonical root."""
    root = o.roots[0]
    g = o.graph if isinstance(o, FiniteOracle) else o
    c = shortest_cycle_through(g, root, cap)
    if c is None:
        raise HypothesisViolation(f"no cycle through {root!r} within radius {cap}", "no_cycle")
    return c


def bootstrap(o: GraphOracle, a: OrientedCycle) -> tuple[OrientedCycle, list]:
    """Extension of ``a`` containing ``N_3(V(a))``, with its step log."""
    wc = WorkingCycle.of(a)
    dist = bfs_distances(o, a.vertices, 3)
    steps = []
    for v in sorted(dist, key=lambda v: (dist[v], v)):
        if v in wc:
            continue
        rec = find_extension(o, wc, v)
        apply_record(wc, rec)
        steps.append({"phase": "bootstrap", "record": rec.to_json()})
    missing = [v for v in dist if v not in wc]
    if missing:
        raise ClawhamError(f"bootstrap missed {len(missing)} vertices")
    return wc.to_cycle(), steps


def _stage_doc(i: int, cycle: OrientedCycle, steps: list, u=None, good=None, notes=None) -> dict:
    doc = {"index": i, "cycle": list(cycle.vertices), "extensions": steps}
    if u is None:
        doc.update({"umbrella": None, "parts": []})
    else:
        doc["umbrella"] = {"blocker": sorted(u.blocker), "k": u.k, "K0_size": len(u.k0)}
        doc["parts"] = good.parts_json()
        doc["notes"] = notes or []
    return doc


def run(o: GraphOracle, stages: int, params: RunParams | None = None) -> dict:
    """Run ``stages`` iterations; every stage is verified before the next.

    A failing stage stops the run; the partial trace records the error in
    ``status``/``error``.
    """
    params = params or RunParams()
    params.validate()
    if not isinstance(stages, int) or stages < 0:
        raise InputError("stages must be a nonnegative integer")
    if stages > 0 and not o.infinite:
        raise InputError("stages beyond 0 need an infinite graph")
    trace = {"format": TRACE_FORMAT, "spec": o.spec(), "params": {"stages": stages, **asdict(params)},
             "stages": [], "status": "ok"}
    if params.force:
        trace["preconditions"] = {"skipped": True}
    else:
        report = check_preconditions(o, params.check_radius)
        trace["preconditions"] = report
        if not report["ok"]:
            raise HypothesisViolation("graph fails the preconditions", "preconditions", report)
    verifier = TraceVerifier(trace, o)
    deadline = None if params.time_budget is None else time.monotonic() + params.time_budget
    try:
        a = initial_cycle(o, params.cap)
        c, steps = bootstrap(o, a)
        stage = _stage_doc(0, c, steps)
        stage["initial"] = list(a.vertices)
        trace["stages"].append(stage)
        stage["verification"] = verifier.verify(0)
        for i in range(1, stages + 1):
            if not stage["verification"]["ok"]:
                break
            if deadline is not None and time.monotonic() > deadline:
                raise ResourceCapExceeded(f"time budget exhausted before stage {i}")
            u = compute_umbrella(o, c.vertices, validate=False)
            p = build_promising(o, c, u, cap=params.cap, deadline=deadline)
            g = build_good(o, p, u, c, cap=params.cap, deadline=deadline)
            stage = _stage_doc(i, g.cycle, p.steps + g.steps, u, g, p.notes)
            trace["stages"].append(stage)
            stage["verification"] = verifier.verify(i)
            c = g.cycle
    except ResourceCapExceeded as exc:
        trace["status"] = "cap"
        trace["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except ClawhamError as exc:
        trace["status"] = "failed"
        trace["error"] = {"type": type(exc).__name__, "message": str(exc),
                          "detail": _json_safe(getattr(exc, "state", None) or getattr(exc, "witness", None))}
    if trace["status"] == "ok" and not all(s["verification"]["ok"] for s in trace["stages"]):
        trace["status"] = "failed"
    if trace["stages"]:
        trace["ends"] = trace["stages"][-1]["verification"].get("ends")
    return trace


def _json_safe(x):
    try:
        json.dumps(x)
        return x
    except TypeError:
        return repr(x)


def dumps_trace(trace: dict) -> str:
    return json.dumps(trace, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- verifier

class _StageSets:
    """Membership in the recorded sets ``M^p_j`` of one stage."""

    def __init__(self, o, doc: dict):
        self.parts = doc["parts"]
        self.k = len(self.parts)
        self.S = [frozenset(p["S"]) for p in self.parts]
        self.blocker = frozenset().union(*self.S) if self.S else frozenset()
        self.view = SeparatedView(o, self.blocker)
        self.s_index = {s: j for j, S in enumerate(self.S) for s in S}
        self.labels = [self.view.label(p["anchor"]) for p in self.parts]
        self.label_index = {lab: j for j, lab in enumerate(self.labels) if lab is not None}
        self.added = [frozenset(p["M_delta"]["added"]) for p in self.parts]
        self.removed = [frozenset(p["M_delta"]["removed"]) for p in self.parts]
        self.extra: dict[str, set] = {}
        for j, a in enumerate(self.added):
            for v in a:
                self.extra.setdefault(v, set()).add(j)

    def base(self, v: str):
        j = self.s_index.get(v)
        if j is not None:
            return j
        return self.label_index.get(self.view.label(v))

    def in_component(self, j: int, v: str) -> bool:
        return v not in self.blocker and self.view.label(v) == self.labels[j]

    def contains(self, j: int, v: str) -> bool:
        if v in self.added[j]:
            return True
        if v in self.removed[j]:
            return False
        return self.base(v) == j

    def owners(self, v: str) -> set:
        out = set()
        b = self.base(v)
        if b is not None and v not in self.removed[b]:
            out.add(b)
        ex = self.extra.get(v)
        if ex:
            out |= ex
        return out

    def crossing(self, cycle: list) -> list:
        """``E(C) ∩ δ(M_j)`` for every j."""
        out = [set() for _ in range(self.k)]
        owners = {v: self.owners(v) for v in cycle}
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            for j in owners[a] ^ owners[b]:
                out[j].add(make_edge(a, b))
        return out


class TraceVerifier:
    """Re-checks recorded stages using only the trace and the graph."""

    def __init__(self, trace: dict, oracle: GraphOracle | None = None):
        self.trace = trace
        self.o = oracle if oracle is not None else build_oracle(trace["spec"])
        self._sets: dict[int, _StageSets] = {}
        self._edges: dict[int, set] = {}

    def stage(self, i: int) -> dict:
        return self.trace["stages"][i]

    def sets(self, p: int) -> _StageSets:
        if p not in self._sets:
            self._sets[p] = _StageSets(self.o, self.stage(p))
        return self._sets[p]

    def edges(self, p: int) -> set:
        if p not in self._edges:
            cyc = self.stage(p)["cycle"]
            self._edges[p] = {make_edge(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1])}
        return self._edges[p]

    # -- individual checks; each returns a list of failure strings

    def _cycle_ok(self, i: int) -> list:
        cyc = self.stage(i)["cycle"]
        if len(cyc) < 3 or len(set(cyc)) != len(cyc):
            return ["cycle has repeated vertices or fewer than three"]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not self.o.has_vertex(a) or b not in self.o.neighbors(a):
                return [f"{a}-{b} is not an edge"]
        return []

    def _replay(self, i: int) -> tuple[list, int]:
        """Re-apply the recorded steps to the previous cycle."""
        st = self.stage(i)
        start = st["initial"] if i == 0 else self.stage(i - 1)["cycle"]
        wc = WorkingCycle(start)
        o = self.o
        count = 0
        out = []
        for n, step in enumerate(st["extensions"]):
            try:
                if "record" in step:
                    rec = ExtensionRecord.from_json(step["record"])
                    before = len(wc)
                    apply_record(wc, rec)
                    count += 1
                    grown = len(wc) - before
                    if grown != (2 if rec.kind == TYPE2_1 else 1):
                        out.append(f"step {n}: vertex sandwich broken")
                    near = bfs_distances(o, [rec.target], 2)
                    for a, b in rec.removed_edges() | rec.added_edges():
                        if a not in near and b not in near:
                            out.append(f"step {n}: edge {a}-{b} changed away from the target")
                    for a, b in rec.added_edges():
                        if b not in o.neighbors(a):
                            out.append(f"step {n}: {a}-{b} is not an edge")
                else:
                    sp = step["splice"]
                    a, b, drop, path = sp["from"], sp["to"], sp["dropped"], sp["path"]
                    nxt = drop[0] if drop else b
                    if wc.succ.get(a) == nxt:
                        fwd, bwd = wc.succ, wc.pred
                    elif wc.pred.get(a) == nxt:
                        fwd, bwd = wc.pred, wc.succ
                    else:
                        out.append(f"step {n}: splice start does not match the cycle")
                        break
                    walk = [a]
                    while walk[-1] != b and len(walk) <= len(drop) + 1:
                        walk.append(fwd[walk[-1]])
                    if walk[1:-1] != list(drop):
                        out.append(f"step {n}: spliced segment does not match the cycle")
                        break
                    for v in drop:
                        wc.drop(v)
                    seq = [a, *path, b]
                    for p, q in zip(seq, seq[1:]):
                        if q not in o.neighbors(p) or (q in wc and q not in (a, b)):
                            out.append(f"step {n}: splice path is not a fresh path")
                        fwd[p] = q
                        bwd[q] = p
            except (ClawhamError, KeyError) as exc:
                out.append(f"step {n}: replay failed: {exc}")
                break
        if not out:
            got = wc.edges()
            if got != self.edges(i):
                out.append("replayed steps do not produce the recorded cycle")
        return out, count

    def _umbrella(self, i: int) -> list:
        st = self.stage(i)
        prev = self.stage(i - 1)["cycle"]
        u = umbrella_from_parts(self.o, prev, [(p["S"], p["anchor"]) for p in st["parts"]])
        out = [f"umbrella: {p['check']}" for p in umbrella_problems(self.o, u)]
        if sorted(u.blocker) != st["umbrella"]["blocker"]:
            out.append("umbrella: parts do not cover the recorded blocker")
        if len(u.view.infinite_labels()) != u.k or u.k != st["umbrella"]["k"]:
            out.append("umbrella: k differs from the number of infinite components")
        facts = check_separator_facts(self.o, u, 0, umbrella=False)
        for part in facts["parts"]:
            for v in part["violations"]:
                out.append(f"separator S_{part['index']}: {v['check']}")
        self._k0 = u.k0_vertices()
        return out

    def _persistence(self, i: int) -> list:
        cur = set(self.stage(i)["cycle"])
        prev = self.stage(i - 1)["cycle"]
        out = []
        if not set(prev) <= cur:
            out.append("a vertex of the previous cycle was lost")
        if not self._k0 <= cur:
            out.append("K0 is not covered")
        if len(cur) <= len(prev):
            out.append("cycle did not grow")
        return out

    def _good_properties(self, i: int) -> tuple[list, list]:
        """Property (1) and the finite inclusions of property (2); returns
        failures and the size of every cut ``δ(M^i_j)``."""
        o, sets = self.o, self.sets(i)
        cur = set(self.stage(i)["cycle"])
        out = []
        ball3 = bfs_distances(o, sets.blocker, 3)
        missing = [v for v in ball3 if v not in cur]
        if missing:
            out.append(f"property (1): {len(missing)} vertices near the blocker are off the cycle")
        near = set(bfs_distances(o, sets.blocker, 1))
        for j in range(sets.k):
            for v in sets.removed[j]:
                if sets.in_component(j, v) and not any(s in sets.S[j] for s in o.neighbors(v)):
                    out.append(f"property (2): M_{j} lost {v}")
            for v in sets.added[j]:
                if not (sets.in_component(j, v) or v in near):
                    out.append(f"property (2): M_{j} gained {v}")
        # every crossing edge has its outer end within distance 2 of the blocker
        sizes = [0] * sets.k
        region = bfs_distances(o, sets.blocker, 2)
        seen = set()
        for b in region:
            ob = sets.owners(b)
            for a in o.neighbors(b):
                e = make_edge(a, b)
                if e in seen:
                    continue
                seen.add(e)
                for j in ob ^ sets.owners(a):
                    sizes[j] += 1
        return out, sizes

    def _edge_stability(self, i: int) -> list:
        out = []
        union = set()
        for q in range(i):
            if q >= 1:
                lost = (union & self.edges(q)) - self.edges(q + 1)
                if lost:
                    e = min(lost)
                    out.append(f"edge {e[0]}-{e[1]} of stages <{q} and {q} is missing at {q + 1}")
            union |= self.edges(q)
        return out

    def _cuts(self, i: int) -> list:
        out = []
        cyc = self.stage(i)["cycle"]
        for p in range(1, i + 1):
            sets = self.sets(p)
            now = sets.crossing(cyc)
            then = now if p == i else sets.crossing(self.stage(p)["cycle"])
            stored = [{make_edge(*e) for e in part["crossing"]} for part in self.stage(p)["parts"]]
            for j in range(sets.k):
                if len(now[j]) != 2:
                    out.append(f"|E(C^{i}) ∩ δ(M^{p}_{j})| = {len(now[j])}")
                elif now[j] != then[j]:
                    out.append(f"E(C^{i}) ∩ δ(M^{p}_{j}) differs from stage {p}")
                elif p == i and now[j] != stored[j]:
                    out.append(f"recorded crossing of M^{p}_{j} is wrong")
        return out

    def _ends(self, i: int) -> tuple[list, dict]:
        last = self.sets(i)
        k = last.k
        m = min(k, self.trace.get("params", {}).get("max_ends", 8))
        picks = sorted({round(t * (k - 1) / (m - 1)) for t in range(m)}) if m > 1 else [0]
        anchors = [last.parts[j]["anchor"] for j in picks]
        f = {}
        out = []
        for a in anchors:
            row = []
            for p in range(1, i + 1):
                b = self.sets(p).base(a)
                if b is None or a in self.sets(p).blocker:
                    out.append(f"end at {a} is not inside an infinite component at stage {p}")
                row.append(b)
            f[a] = row
        if out:
            return out, {"anchors": anchors, "f": f}
        # nesting M^q_{f(q)} ⊆ M^p_{f(p)} for p < q
        for a in anchors:
            for p, q in combinations(range(1, i + 1), 2):
                sp, sq = self.sets(p), self.sets(q)
                jp, jq = f[a][p - 1], f[a][q - 1]
                if any(sq.in_component(jq, s) for s in sp.blocker):
                    out.append(f"end {a}: K^{q} is not inside K^{p}")
                    continue
                for v in sq.S[jq] | sq.added[jq]:
                    if sq.contains(jq, v) and not sp.contains(jp, v):
                        out.append(f"end {a}: {v} in M^{q} but not in M^{p}")
                for r in sp.removed[jp]:
                    if sq.contains(jq, r):
                        out.append(f"end {a}: {r} removed at stage {p} is back in M^{q}")
        # once two ends are split they stay in disjoint sets
        split = {}
        for a, b in combinations(anchors, 2):
            t = next((p for p in range(1, i + 1) if f[a][p - 1] != f[b][p - 1]), None)
            split[f"{a}|{b}"] = t
            if t is None:
                continue
            for q in range(t, i + 1):
                sq = self.sets(q)
                ja, jb = f[a][q - 1], f[b][q - 1]
                if ja == jb:
                    out.append(f"ends {a} and {b} merge again at stage {q}")
                    continue
                for v in sq.added[ja] | sq.added[jb] | sq.S[ja] | sq.S[jb]:
                    if sq.contains(ja, v) and sq.contains(jb, v):
                        out.append(f"ends {a} and {b}: {v} lies in both sets at stage {q}")
        # every vertex eventually leaves all the sets
        if i >= 2:
            sets = self.sets(i)
            for v in self.stage(i - 2)["cycle"]:
                if sets.owners(v):
                    out.append(f"{v} of C^{i - 2} still lies in some M^{i}")
                    break
        counts = [self.sets(p).k for p in range(1, i + 1)]
        info = {"anchors": anchors, "f": f, "split_at": split, "descriptor_counts": counts,
                "strictly_increasing": all(x < y for x, y in zip(counts, counts[1:]))}
        return out, info

    def verify(self, i: int) -> dict:
        if not 0 <= i < len(self.trace["stages"]):
            raise InputError(f"stage {i} is not in the trace")
        checks = {}
        info = {}
        checks["cycle"] = self._cycle_ok(i)
        replay, count = self._replay(i)
        checks["replay"] = replay
        info["extension_steps"] = count
        if i == 0:
            initial = self.stage(0)["initial"]
            cur = set(self.stage(0)["cycle"])
            n3 = bfs_distances(self.o, initial, 3)
            checks["bootstrap"] = [] if all(v in cur for v in n3) else ["N_3 of the initial cycle not covered"]
        else:
            checks["umbrella"] = self._umbrella(i)
            checks["persistence"] = self._persistence(i)
            fails, sizes = self._good_properties(i)
            checks["cut_finite"] = fails
            info["cut_sizes"] = {"min": min(sizes), "max": max(sizes)} if sizes else None
            checks["edge_stability"] = self._edge_stability(i)
            checks["cuts"] = self._cuts(i)
            fails, ends = self._ends(i)
            checks["ends"] = fails
            info["ends"] = ends
            info["k"] = self.sets(i).k
        report = {"stage": i, "ok": not any(checks.values()),
                  "checks": {name: {"ok": not v, "failures": v[:10]} for name, v in checks.items()}}
        report.update(info)
        return report


def verify_stage(trace: dict, i: int, oracle: GraphOracle | None = None) -> dict:
    """Independent verification of stage ``i`` (recomputed from the trace)."""
    return TraceVerifier(trace, oracle).verify(i)


def verify_trace(trace: dict, oracle: GraphOracle | None = None) -> dict:
    if not isinstance(trace, dict) or "stages" not in trace or "spec" not in trace:
        raise InputError("not a trace document")
    stages = trace["stages"]
    if not stages:
        return {"ok": True, "stages": []}
    v = TraceVerifier(trace, oracle)
    reports = []
    for i, st in enumerate(stages):
        if st.get("index") != i:
            raise InputError("trace stages are not indexed consecutively")
        reports.append(v.verify(i))
    return {"ok": all(r["ok"] for r in reports), "stages": reports}
