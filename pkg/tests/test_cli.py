from __future__ import annotations

import json

import pytest

from clawham.cli import EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main

from conftest import INSTANCES, complete, graph


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)
    return write


def test_check(files, capsys):
    assert main(["check", "--spec", files("s3.json", INSTANCES["S3"]), "--radius", "4"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ok"]
    plain = {"base": {"kind": "S", "n": 3}, "transforms": []}
    assert main(["check", "--spec", files("plain.json", plain)]) == EXIT_FAIL
    assert main(["check", "--spec", files("bad.json", "{not json")]) == EXIT_INPUT
    assert main(["check", "--spec", files("kind.json", {"base": {"kind": "X"}})]) == EXIT_INPUT


def test_run_and_verify(files, tmp_path, capsys):
    spec = files("s3.json", INSTANCES["S3"])
    out = str(tmp_path / "trace.json")
    assert main(["run", "--spec", spec, "--stages", "2", "--out", out]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["status"] == "ok" and [s["k"] for s in summary["stages"]] == [None, 3, 3]
    assert main(["verify", "--trace", out]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ok"]

    trace = json.loads(open(out).read())
    trace["stages"][2]["cycle"].pop()
    bad = files("tampered.json", trace)
    assert main(["verify", "--trace", bad]) == EXIT_FAIL
    assert not json.loads(capsys.readouterr().out)["ok"]

    assert main(["run", "--spec", spec, "--stages", "0"]) == EXIT_OK
    zero = json.loads(capsys.readouterr().out)
    assert len(zero["stages"]) == 1 and zero["stages"][0]["umbrella"] is None


def test_run_exit_codes(files, capsys):
    spec = files("s3.json", INSTANCES["S3"])
    assert main(["run", "--spec", spec, "--stages", "2", "--cap", "3"]) == EXIT_CAP
    t3 = files("t3.json", INSTANCES["T3"])
    assert main(["run", "--spec", t3, "--stages", "4", "--time-budget", "0.01"]) == EXIT_CAP
    plain = files("plain.json", {"base": {"kind": "S", "n": 3}, "transforms": []})
    assert main(["run", "--spec", plain, "--stages", "1"]) == EXIT_FAIL
    assert main(["run", "--spec", spec, "--stages", "-1"]) == EXIT_INPUT


def test_verify_empty(files):
    for doc in ("", "{}", json.dumps({"stages": []})):
        assert main(["verify", "--trace", files("empty.json", doc)]) == EXIT_OK
    assert main(["verify", "--trace", files("junk.json", "[1, 2")]) == EXIT_INPUT


def test_finite(files, capsys):
    g = complete(6)
    k6pm = graph([e for e in g.edges() if e not in {("v0", "v1"), ("v2", "v3"), ("v4", "v5")}], g.vertices)
    assert main(["finite", "--graph", files("k6pm.json", k6pm.to_json()), "--mode", "both"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["agree"] and out["class"] == "CLIQUE_MINUS_MATCHING"
    p4 = graph([("a", "b"), ("b", "c"), ("c", "d")])
    assert main(["finite", "--graph", files("p4.json", p4.to_json()), "--mode", "brute"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["brute"]["hamiltonian"] is False
    claw = graph([("c", "x"), ("c", "y"), ("c", "z"), ("x", "y"), ("y", "z"), ("c", "w")])
    assert main(["finite", "--graph", files("claw.json", claw.to_json()), "--mode", "extension"]) == EXIT_FAIL
    assert json.loads(capsys.readouterr().out)["extension"]["kind"] == "two_connected"
    spec = {"base": {"kind": "finite", "graph": complete(3).to_json()}, "transforms": [{"op": "blow_up", "k": 2}]}
    assert main(["finite", "--graph", files("blow.json", spec)]) == EXIT_OK
    assert main(["finite", "--graph", files("inf.json", INSTANCES["S3"])]) == EXIT_INPUT


def test_export_dot(files, tmp_path, capsys):
    ls3 = files("ls3.json", {"base": {"kind": "S", "n": 3}, "transforms": [{"op": "line_graph"}]})
    assert main(["export-dot", "--spec", ls3, "--radius", "2"]) == EXIT_OK
    dot = capsys.readouterr().out
    centre = ['"(r|r.0)"', '"(r|r.1)"', '"(r|r.2)"']
    for i, a in enumerate(centre):
        for b in centre[i + 1:]:
            assert f"{a} -- {b};" in dot
    assert main(["export-dot", "--spec", ls3, "--radius", "0"]) == EXIT_OK
    dot = capsys.readouterr().out
    # radius 0 draws the root set alone: the central triangle, nothing else
    assert dot.count(" -- ") == 3 and dot.count(";") == 7
    plain = files("s3plain.json", {"base": {"kind": "S", "n": 3}, "transforms": []})
    assert main(["export-dot", "--spec", plain, "--radius", "0"]) == EXIT_OK
    dot = capsys.readouterr().out
    assert " -- " not in dot and '"r";' in dot
    spec = files("s3.json", INSTANCES["S3"])
    out = str(tmp_path / "trace.json")
    assert main(["run", "--spec", spec, "--stages", "1", "--out", out]) == EXIT_OK
    capsys.readouterr()
    trace = json.loads(open(out).read())
    assert main(["export-dot", "--trace", out, "--radius", "1"]) == EXIT_OK
    dot = capsys.readouterr().out
    assert dot.count("color=red") == len(trace["stages"][-1]["cycle"])
    assert main(["export-dot", "--trace", out, "--radius", "0", "--stage", "0"]) == EXIT_OK
    assert capsys.readouterr().out.count("color=red") == len(trace["stages"][0]["cycle"])
    assert main(["export-dot", "--spec", ls3, "--radius", "-1"]) == EXIT_INPUT
