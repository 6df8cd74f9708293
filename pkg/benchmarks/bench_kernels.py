"""Compiled vs pure-Python bitmask kernels.

Runs the same workloads through ``clawham._kernels`` (Cython) and
``clawham._kernels_py`` and checks that both return identical results.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from clawham import _kernels_py
from clawham.finite import random_codes

try:
    from clawham import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def workloads():
    n7 = list(random_codes(7, 3000, seed=1))
    n10 = list(random_codes(10, 300, seed=2))
    adj10 = [_kernels_py.adjacency_from_code(10, c) for c in n10]
    return {
        "scan_codes n=6 (all 32768)": lambda k: k.scan_codes(6, 0, 1 << 15),
        "classify_code n=7 (3000 random)": lambda k: [k.classify_code(7, c) for c in n7],
        "hamilton_cycle_mask n=10 (300 random)": lambda k: [k.hamilton_cycle_mask(a, 10) is None for a in adj10],
        "cycle_spectrum_mask n=10 (300 random)": lambda k: [k.cycle_spectrum_mask(a, 10) for a in adj10],
    }


def best_of(fn, impl, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(impl)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the results here")
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rows = []
    print(f"{'workload':42} {'python s':>10} {'compiled s':>11} {'speedup':>8}  same")
    for name, fn in workloads().items():
        tp, rp = best_of(fn, _kernels_py, args.repeat)
        tc, rc = best_of(fn, _compiled, args.repeat)
        rows.append({"workload": name, "python_s": tp, "compiled_s": tc, "speedup": tp / tc, "same": rp == rc})
        print(f"{name:42} {tp:10.3f} {tc:11.4f} {tp / tc:7.1f}x  {rp == rc}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["same"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
