"""Command-line interface.

Exit codes: 0 pass, 1 semantic failure, 2 input error, 3 resource cap.
JSON reports go to standard output, one-line summaries to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .driver import RunParams, dumps_trace, run, verify_trace
from .errors import ClawhamError, HypothesisViolation, InputError, ResourceCapExceeded
from .finite import brute_force_hamilton, classify_paw_free, finite_hamilton_by_extension, hypothesis_report
from .forbidden import check_preconditions
from .graph import FiniteGraph, bfs_distances, make_edge, validate_cycle
from .oracle import FiniteOracle, build_oracle, load_spec

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _read_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {what} {path}: {exc}") from None
    if not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} {path} is not valid JSON: {exc}") from None


def cmd_check(args) -> int:
    o = load_spec(args.spec)
    report = check_preconditions(o, args.radius)
    _emit(report)
    _note(f"check: {'pass' if report['ok'] else 'FAIL'} (radius {args.radius}, {report['ball_vertices']} vertices)")
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_run(args) -> int:
    if args.stages < 0:
        raise InputError("--stages must be nonnegative")
    if args.cap < 4:
        _emit({"status": "cap", "error": f"working radius cap {args.cap} is below 4"})
        _note(f"run: cap {args.cap} is below 4")
        return EXIT_CAP
    o = load_spec(args.spec)
    params = RunParams(cap=args.cap, check_radius=args.radius, force=args.force, max_ends=args.max_ends,
                       time_budget=args.time_budget)
    try:
        trace = run(o, args.stages, params)
    except HypothesisViolation as exc:
        _emit({"status": "failed", "error": str(exc), "kind": exc.kind, "witness": _plain(exc.witness)})
        _note(f"run: {exc}")
        return EXIT_FAIL
    text = dumps_trace(trace)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from None
        summary = {"status": trace["status"], "out": args.out, "error": trace.get("error"),
                   "stages": [{"index": s["index"], "cycle_length": len(s["cycle"]),
                               "k": s["verification"].get("k"), "ok": s["verification"]["ok"]}
                              for s in trace["stages"]]}
        _emit(summary)
    else:
        sys.stdout.write(text)
    _note(f"run: {trace['status']} after {len(trace['stages']) - 1} stage(s)")
    return {"ok": EXIT_OK, "cap": EXIT_CAP}.get(trace["status"], EXIT_FAIL)


def cmd_verify(args) -> int:
    trace = _read_json(args.trace, "trace")
    if trace is None or trace == {} or trace.get("stages") == []:
        _emit({"ok": True, "stages": []})
        _note("verify: empty trace, nothing to check")
        return EXIT_OK
    report = verify_trace(trace)
    _emit(report)
    bad = [r["stage"] for r in report["stages"] if not r["ok"]]
    _note("verify: pass" if report["ok"] else f"verify: FAIL at stages {bad}")
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _load_finite(path: str) -> FiniteGraph:
    doc = _read_json(path, "graph")
    if not isinstance(doc, dict):
        raise InputError("graph file must hold a JSON object")
    if "base" in doc:
        o = build_oracle(doc)
        if not isinstance(o, FiniteOracle):
            raise InputError("finite mode needs a finite graph")
        return o.graph
    return FiniteGraph.from_json(doc)


def cmd_finite(args) -> int:
    g = _load_finite(args.graph)
    out = {"vertices": len(g), "mode": args.mode, "class": classify_paw_free(g).value}
    ok = True
    brute = None
    if args.mode in ("brute", "both"):
        brute = brute_force_hamilton(g)
        out["brute"] = {"hamiltonian": brute is not None, "cycle": None if brute is None else list(brute.vertices)}
    if args.mode in ("extension", "both"):
        try:
            c = finite_hamilton_by_extension(g)
            valid, _ = validate_cycle(g, c)
            out["extension"] = {"hamiltonian": True, "cycle": list(c.vertices), "valid": valid}
            ok = valid
        except HypothesisViolation as exc:
            out["extension"] = {"error": str(exc), "kind": exc.kind, "witness": _plain(exc.witness)}
            out["hypotheses"] = hypothesis_report(g)
            ok = False
    if args.mode == "both" and "cycle" in out.get("extension", {}):
        out["agree"] = brute is not None
        ok = ok and out["agree"]
    _emit(out)
    _note(f"finite: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _quote(v: str) -> str:
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'


def cmd_export_dot(args) -> int:
    if args.radius < 0:
        raise InputError("--radius must be nonnegative")
    highlight = set()
    if args.trace:
        trace = _read_json(args.trace, "trace")
        if not trace or not trace.get("stages"):
            raise InputError("trace has no stages")
        o = build_oracle(trace["spec"])
        cyc = trace["stages"][args.stage]["cycle"] if args.stage is not None else trace["stages"][-1]["cycle"]
        centre = cyc
        highlight = {make_edge(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1])}
    else:
        o = load_spec(args.spec)
        centre = list(o.roots)
    dist = bfs_distances(o, centre, args.radius)
    lines = ["graph G {", "  node [shape=point];"]
    for v in sorted(dist):
        lines.append(f"  {_quote(v)};")
    edges = sorted({make_edge(v, w) for v in dist for w in o.neighbors(v) if w in dist})
    for a, b in edges:
        style = " [color=red, penwidth=2]" if (a, b) in highlight else ""
        lines.append(f"  {_quote(a)} -- {_quote(b)}{style};")
    lines.append("}")
    sys.stdout.write("\n".join(lines) + "\n")
    _note(f"export-dot: {len(dist)} vertices, {len(edges)} edges, {len(highlight & set(edges))} cycle edges")
    return EXIT_OK


def _plain(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    try:
        json.dumps(x)
        return x
    except TypeError:
        return repr(x)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clawham", description="Hamilton cycles in claw-free graphs by cycle extension.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check the hypotheses around the roots")
    c.add_argument("--spec", required=True)
    c.add_argument("--radius", type=int, default=4)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="run the staged construction and write a trace")
    r.add_argument("--spec", required=True)
    r.add_argument("--stages", type=int, default=4)
    r.add_argument("--cap", type=int, default=16, help="working radius cap (at least 4)")
    r.add_argument("--out", help="trace file (default: standard output)")
    r.add_argument("--force", action="store_true", help="skip the hypothesis check")
    r.add_argument("--radius", type=int, default=4, help="radius of the hypothesis check")
    r.add_argument("--max-ends", type=int, default=8, dest="max_ends")
    r.add_argument("--time-budget", type=float, default=None, dest="time_budget",
                   help="seconds before the run stops with exit code 3")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="re-verify every stage of a trace")
    v.add_argument("--trace", required=True)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("finite", help="Hamiltonicity of a finite graph")
    f.add_argument("--graph", required=True)
    f.add_argument("--mode", choices=("brute", "extension", "both"), default="both")
    f.set_defaults(func=cmd_finite)

    d = sub.add_parser("export-dot", help="DOT picture of a ball, optionally with a cycle")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec")
    src.add_argument("--trace")
    d.add_argument("--radius", type=int, default=2)
    d.add_argument("--stage", type=int, default=None)
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapExceeded as exc:
        _note(f"{args.command}: resource cap: {exc}")
        return EXIT_CAP
    except InputError as exc:
        _note(f"{args.command}: input error: {exc}")
        return EXIT_INPUT
    except ClawhamError as exc:
        _note(f"{args.command}: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
