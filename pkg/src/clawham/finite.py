"""Ground truth for finite graphs: brute-force Hamiltonicity, cycle lengths,
labelled enumeration, the paw-free classification and the extension-based
Hamilton cycle construction, plus the exhaustive harness built on them."""

from __future__ import annotations

import enum
import random
from itertools import combinations
from typing import Callable, Iterator

from . import kernels
from .errors import HypothesisViolation, InputError, InvariantViolation, ResourceCapExceeded
from .extension import WorkingCycle, apply_record, find_extension
from .forbidden import check_phi, enumerate_induced_paws, find_claw
from .graph import FiniteGraph, OrientedCycle, bfs_distances, is_connected, is_two_connected, validate_cycle

EXHAUSTIVE_MAX_N = 7
SPECTRUM_CAP = 12


class GraphClass(str, enum.Enum):
    CYCLE = "CYCLE"
    CLIQUE = "CLIQUE"
    CLIQUE_MINUS_MATCHING = "CLIQUE_MINUS_MATCHING"
    OTHER = "OTHER"


def _masks(g: FiniteGraph) -> tuple[list[str], list[int]]:
    order = list(g.vertices)
    index = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for v in order:
        for w in g.neighbors(v):
            adj[index[v]] |= 1 << index[w]
    return order, adj


def brute_force_hamilton(g: FiniteGraph) -> OrientedCycle | None:
    """A Hamilton cycle by backtracking, or None when there is none."""
    n = len(g)
    if n < 3:
        return None
    order, adj = _masks(g)
    path = kernels.hamilton_cycle_mask(adj, n)
    if path is None:
        return None
    return OrientedCycle([order[i] for i in path])


def count_hamilton_cycles(g: FiniteGraph) -> int:
    """Number of Hamilton cycles up to rotation and reflection."""
    n = len(g)
    if n < 3:
        return 0
    order, adj = _masks(g)
    full = (1 << n) - 1
    count = 0

    def walk(v: int, seen: int, first: int) -> None:
        nonlocal count
        if seen == full:
            if adj[v] & 1:
                count += 1
            return
        cand = adj[v] & ~seen
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            cand ^= low
            walk(w, seen | low, first if first >= 0 else w)

    walk(0, 1, -1)
    return count // 2


def cycle_length_spectrum(g: FiniteGraph, cap: int = SPECTRUM_CAP) -> set[int]:
    """Every length ``l`` in ``3..n`` realised by a cycle of ``g``."""
    n = len(g)
    if n > cap:
        raise ResourceCapExceeded(f"{n} vertices exceed the spectrum cap {cap}")
    if n < 3:
        return set()
    _, adj = _masks(g)
    mask = kernels.cycle_spectrum_mask(adj, n)
    return {l for l in range(3, n + 1) if mask >> l & 1}


def graph_from_code(n: int, code: int) -> FiniteGraph:
    """Labelled graph on ``"0" .. "n-1"``; bit ``k`` of ``code`` is the
    ``k``-th pair in lexicographic order."""
    adj = {str(i): [] for i in range(n)}
    for k, (i, j) in enumerate(combinations(range(n), 2)):
        if code >> k & 1:
            adj[str(i)].append(str(j))
            adj[str(j)].append(str(i))
    return FiniteGraph(adj)


def random_codes(n: int, count: int, seed: int = 0) -> Iterator[int]:
    """Seeded random graph codes: each draw picks a density uniformly in
    ``[0.3, 0.95]`` and then every pair independently."""
    rng = random.Random(seed)
    m = n * (n - 1) // 2
    for _ in range(count):
        p = rng.uniform(0.3, 0.95)
        code = 0
        for k in range(m):
            if rng.random() < p:
                code |= 1 << k
        yield code


def enumerate_small_graphs(n: int, filter: Callable[[FiniteGraph], bool] | None = None, *,
                           sample: int | None = None, seed: int = 0) -> Iterator[FiniteGraph]:
    """Labelled graphs on ``n`` vertices passing ``filter``.

    Exhaustive in code order for ``n <= 7``.  Larger ``n`` needs ``sample``:
    that many draws from :func:`random_codes`, filtered (so fewer graphs may
    come out).
    """
    if not isinstance(n, int) or n < 0:
        raise InputError("n must be a nonnegative integer")
    if sample is None:
        if n > EXHAUSTIVE_MAX_N:
            raise InputError(f"exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_N}; pass sample=")
        codes = range(1 << (n * (n - 1) // 2))
    else:
        codes = random_codes(n, sample, seed)
    for code in codes:
        g = graph_from_code(n, code)
        if filter is None or filter(g):
            yield g


def classify_paw_free(g: FiniteGraph) -> GraphClass:
    n = len(g)
    degrees = [len(g.neighbors(v)) for v in g.vertices]
    if all(d == n - 1 for d in degrees):
        return GraphClass.CLIQUE
    if n >= 3 and all(d == 2 for d in degrees) and is_connected(g):
        return GraphClass.CYCLE
    if all(d >= n - 2 for d in degrees):
        return GraphClass.CLIQUE_MINUS_MATCHING
    return GraphClass.OTHER


def hypothesis_report(g: FiniteGraph) -> dict:
    """2-connectivity, claw-freeness and the paw condition, exactly."""
    claw = find_claw(g)
    bad = None
    if claw is None:
        for p in enumerate_induced_paws(g):
            if check_phi(g, p) is None:
                bad = p
                break
    return {"two_connected": is_two_connected(g), "claw": None if claw is None else claw.to_json(),
            "phi_violation": None if bad is None else bad.to_json()}


def finite_hamilton_by_extension(g: FiniteGraph, *, check: bool = True) -> OrientedCycle:
    """Hamilton cycle grown by repeated single-vertex extensions.

    ``check=False`` skips the hypothesis test (for callers that already
    ran it); the output cycle is always validated.
    """
    if check:
        rep = hypothesis_report(g)
        if not rep["two_connected"]:
            raise HypothesisViolation("graph is not 2-connected", "two_connected")
        if rep["claw"] is not None:
            raise HypothesisViolation("graph contains an induced claw", "claw", rep["claw"])
        if rep["phi_violation"] is not None:
            raise HypothesisViolation("an induced paw has no common neighbour", "phi", rep["phi_violation"])
    if len(g) < 3:
        raise HypothesisViolation("graph is too small to have a cycle", "no_cycle")
    from .graph import shortest_cycle_through

    start = shortest_cycle_through(g, g.vertices[0])
    if start is None:
        raise HypothesisViolation("no cycle through the first vertex", "no_cycle")
    wc = WorkingCycle.of(start)
    dist = bfs_distances(g, start.vertices)
    for v in sorted(dist, key=lambda v: (dist[v], v)):
        if v in wc:
            continue
        try:
            rec = find_extension(g, wc, v)
        except HypothesisViolation as exc:
            raise InvariantViolation(f"extension dead end at {v!r}: {exc}",
                                     witness={"graph": g.to_json(), "cycle": wc.sequence()}) from exc
        apply_record(wc, rec)
    c = wc.to_cycle()
    ok, witness = validate_cycle(g, c)
    if not ok or len(c.vertices) != len(g):
        raise InvariantViolation("extension result is not a Hamilton cycle",
                                 witness={"graph": g.to_json(), "cycle": list(c.vertices), "detail": witness})
    return c


# ------------------------------------------------------------------ harness

def exhaustive_summary(n: int, *, start: int = 0, stop: int | None = None) -> dict:
    """Scan every labelled graph on ``n`` vertices and check the two finite
    theorems on the 2-connected claw-free ones.

    Returns counts and every counterexample candidate (expected: none).
    ``admitted`` lists the codes whose paws all satisfy the condition.
    """
    if n > EXHAUSTIVE_MAX_N:
        raise InputError(f"exhaustive mode is limited to n <= {EXHAUSTIVE_MAX_N}")
    total = 1 << (n * (n - 1) // 2)
    stop = total if stop is None else min(stop, total)
    codes, flags, spectra = kernels.scan_codes(n, start, stop)
    full = 0
    for l in range(3, n + 1):
        full |= 1 << l
    out = {"n": n, "enumerated": stop - start, "two_connected_claw_free": len(codes), "paw_free": 0,
           "admitted": [], "classes": {c.value: 0 for c in GraphClass},
           "counterexamples": {"paw_free_not_hamiltonian": [], "paw_free_other_class": [],
                               "not_pancyclic_nor_cycle": []}}
    for code, fl, spec in zip(codes, flags, spectra):
        if fl & kernels.PAW_FREE:
            out["paw_free"] += 1
            if not fl & kernels.HAMILTONIAN:
                out["counterexamples"]["paw_free_not_hamiltonian"].append(code)
            cls = classify_paw_free(graph_from_code(n, code))
            out["classes"][cls.value] += 1
            if cls is GraphClass.OTHER:
                out["counterexamples"]["paw_free_other_class"].append(code)
        if fl & kernels.PHI_OK:
            out["admitted"].append(code)
            if spec & full != full:
                g = graph_from_code(n, code)
                if classify_paw_free(g) is not GraphClass.CYCLE:
                    out["counterexamples"]["not_pancyclic_nor_cycle"].append(code)
    out["ok"] = not any(out["counterexamples"].values())
    return out


def extension_agreement(graphs, *, check: bool = False) -> dict:
    """Run :func:`finite_hamilton_by_extension` on every graph; every run
    must return a validated Hamilton cycle."""
    done = 0
    failures = []
    for g in graphs:
        try:
            finite_hamilton_by_extension(g, check=check)
            done += 1
        except (HypothesisViolation, InvariantViolation) as exc:
            failures.append({"graph": g.to_json(), "error": str(exc)})
    return {"checked": done + len(failures), "succeeded": done, "failures": failures[:10],
            "ok": not failures}


def sample_admitted(n: int, count: int, seed: int = 0, max_draws: int = 10_000_000) -> list[int]:
    """``count`` admitted codes on ``n`` vertices from the seeded stream of
    :func:`random_codes` (first hits in draw order, duplicates kept)."""
    if n > 32:
        raise InputError("sampling is limited to 32 vertices")
    out = []
    rng_codes = random_codes(n, max_draws, seed)
    for code in rng_codes:
        flags, _ = kernels.classify_code(n, code)
        if flags & kernels.CLAW_FREE and flags & kernels.PHI_OK:
            out.append(code)
            if len(out) == count:
                return out
    raise ResourceCapExceeded(f"found only {len(out)} admitted graphs in {max_draws} draws")
