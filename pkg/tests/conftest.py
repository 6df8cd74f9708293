from __future__ import annotations

import pytest

from clawham.driver import RunParams, run
from clawham.graph import FiniteGraph
from clawham.oracle import build_oracle

INSTANCES = {
    "S3": {"base": {"kind": "S", "n": 3}, "transforms": [{"op": "line_graph"}, {"op": "blow_up", "k": 2}]},
    "S4": {"base": {"kind": "S", "n": 4}, "transforms": [{"op": "line_graph"}, {"op": "blow_up", "k": 2}]},
    "D3": {"base": {"kind": "D", "n": 3}, "transforms": [{"op": "line_graph"}, {"op": "blow_up", "k": 2}]},
    "T3": {"base": {"kind": "T", "n": 3}, "transforms": [{"op": "line_graph"}, {"op": "blow_up", "k": 2}]},
}

# stages each instance is run for in the shared fixtures; T3 grows ~16x
# per stage, so four stages are out of reach in this sandbox
STAGES = {"S3": 4, "S4": 4, "D3": 4, "T3": 2}

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def instance(name: str):
    return build_oracle(INSTANCES[name])


def graph(edges, vertices=()) -> FiniteGraph:
    vs = set(vertices)
    for a, b in edges:
        vs.update((a, b))
    return FiniteGraph.from_edges(sorted(vs), edges)


def complete(n: int, prefix: str = "v") -> FiniteGraph:
    names = [f"{prefix}{i}" for i in range(n)]
    return graph([(a, b) for i, a in enumerate(names) for b in names[i + 1:]], names)


def cycle_graph(n: int, prefix: str = "v") -> FiniteGraph:
    names = [f"{prefix}{i}" for i in range(n)]
    return graph([(names[i], names[(i + 1) % n]) for i in range(n)], names)


class _Runs:
    def __init__(self):
        self._cache = {}

    def get(self, name: str, stages: int | None = None) -> dict:
        stages = STAGES[name] if stages is None else stages
        key = (name, stages)
        if key not in self._cache:
            self._cache[key] = run(instance(name), stages, RunParams())
        return self._cache[key]


@pytest.fixture(scope="session")
def runs() -> _Runs:
    return _Runs()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def extension_walk(o, start, rng, steps: int, region=None) -> dict:
    """Grow ``start`` by random single-vertex extensions, checking every one.

    ``region`` (a set) restricts the targets; the walk stops early once no
    neighbour of the cycle is left in it.  Returns call and failure counts.
    """
    from clawham.errors import ClawhamError
    from clawham.extension import WorkingCycle, apply_record, extension_problems, find_extension
    from clawham.graph import make_edge

    wc = WorkingCycle.of(start)
    frontier = {w for v in wc.vertex_set() for w in o.neighbors(v) if w not in wc}
    calls, failures, kinds = 0, [], {}
    for _ in range(steps):
        cand = sorted(v for v in frontier if region is None or v in region)
        if not cand:
            break
        v = rng.choice(cand)
        before = wc.copy()
        calls += 1
        try:
            rec = find_extension(o, wc, v)
            apply_record(wc, rec)
        except ClawhamError as exc:
            failures.append({"target": v, "error": f"{type(exc).__name__}: {exc}"})
            break
        kinds[rec.kind] = kinds.get(rec.kind, 0) + 1
        problems = extension_problems(o, before, wc, rec)
        seq = wc.sequence()
        if len(set(seq)) != len(seq) or any(seq[i] not in o.neighbors(seq[i - 1]) for i in range(len(seq))):
            problems.append("invalid cycle")
        near = set(o.neighbors(v)) | {v}
        near |= {y for x in list(near) for y in o.neighbors(x)}
        changed = set(before.edges()) ^ set(wc.edges())
        if not all(a in near or b in near for a, b in changed):
            problems.append("edge change outside N2(v)")
        if make_edge(*rec.foundation) not in before.edges():
            problems.append("foundation not a cycle edge")
        if problems:
            failures.append({"target": v, "record": rec.to_json(), "problems": problems})
            break
        frontier.discard(v)
        for x in (v, rec.w):
            if x is not None:
                frontier.discard(x)
                frontier.update(w for w in o.neighbors(x) if w not in wc)
    return {"calls": calls, "failures": failures, "kinds": kinds, "length": len(wc)}


class Lollipop:
    """A clique ``c0 .. c{m-1}`` with a ray ``p1 p2 ...`` hanging off ``c0``.

    Depth is 0 on the clique and ``i`` at ``p_i``, so every vertex of depth
    at least ``d`` beyond a removed set still reaches infinity downwards.
    """

    infinite = True
    two_connected_guarantee = False

    def __init__(self, m: int = 4):
        self.m = m
        self.roots = ("c0",)

    def validate(self, v):
        from clawham.errors import InputError

        if isinstance(v, str) and v[:1] in ("c", "p") and v[1:].isdigit() and str(int(v[1:])) == v[1:]:
            i = int(v[1:])
            if (v[0] == "c" and i < self.m) or (v[0] == "p" and i >= 1):
                return
        raise InputError(f"not a lollipop vertex: {v!r}")

    def has_vertex(self, v):
        try:
            self.validate(v)
        except Exception:
            return False
        return True

    def neighbors(self, v):
        self.validate(v)
        if v[0] == "c":
            out = [f"c{i}" for i in range(self.m) if f"c{i}" != v]
            if v == "c0":
                out.append("p1")
        else:
            i = int(v[1:])
            out = [f"p{i + 1}", "c0" if i == 1 else f"p{i - 1}"]
        return tuple(sorted(out))

    def depth(self, v):
        self.validate(v)
        return 0 if v[0] == "c" else int(v[1:])

    def piece(self, v, d):
        return "c0" if d == 0 else f"p{d}"

    def level_members(self, key, d):
        return (key,)

    def spec(self):
        return {"base": {"kind": "lollipop", "m": self.m}, "transforms": []}


def lollipop_instance(m: int = 4):
    from clawham.oracle import BlowUp, LineGraph

    return BlowUp(LineGraph(Lollipop(m)), 2)
