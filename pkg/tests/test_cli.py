import io as _io
import json
import subprocess
import sys

import pytest

from ksetlab import io
from ksetlab.cli import main


def run(argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", _io.StringIO(stdin))
    buf = _io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def sh(argv, stdin=None):
    return subprocess.run([sys.executable, "-m", "ksetlab", *argv], input=stdin, capture_output=True, text=True)


@pytest.fixture
def c5_file(tmp_path):
    path = tmp_path / "c5.json"
    path.write_text(json.dumps({"n": 5, "directed": False, "edges": [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]]}))
    return str(path)


def test_graph_dgt_on_c5_file(c5_file):
    code, text = run(["graph", "dgt", "--graph", c5_file, "--t", "1"])
    doc = json.loads(text)
    assert code == 0 and doc["value"] == 3
    io.validate(doc, "quantity")
    assert any("self-loops" in n for n in doc["notes"])


def test_rad_equals_bigrad():
    _, a = run(["graph", "rad", "--graph", "cycle:6", "--t", "0", "--k", "2"])
    _, b = run(["graph", "bigrad", "--graph", "cycle:6", "--m", "2"])
    assert json.loads(a)["value"] == json.loads(b)["value"] == 1


def test_domset_k4():
    code, text = run(["graph", "domset", "--graph", "complete:4"])
    assert code == 0 and json.loads(text)["value"] == 1


def test_infinite_values_are_strings():
    _, text = run(["graph", "dgt", "--graph", "path:3", "--t", "1"])
    assert json.loads(text)["value"] == "inf"


def test_kuhn_pipe_check_shelling():
    a = sh(["complex", "kuhn", "--n", "3", "--k", "2"])
    b = sh(["complex", "check-shelling", "--order", "kuhn"], stdin=a.stdout)
    assert b.returncode == 0, b.stderr
    assert json.loads(b.stdout)["ok"] is True


def test_pseudosphere_skeleton_pipe():
    a = sh(["complex", "pseudosphere", "--n", "4", "--values", "2"])
    b = sh(["complex", "skeleton", "--d", "2"], stdin=a.stdout)
    c = sh(["complex", "check-shelling", "--order", "face-pseudo"], stdin=b.stdout)
    assert c.returncode == 0, c.stderr
    doc = json.loads(c.stdout)
    assert doc["ok"] is True
    io.validate(doc, "shelling")


def test_betti_hollow_triangle(monkeypatch):
    hollow = {"facets": [[{"p": 1, "label": "1"}, {"p": 2, "label": "1"}],
                         [{"p": 2, "label": "1"}, {"p": 3, "label": "1"}],
                         [{"p": 1, "label": "1"}, {"p": 3, "label": "1"}]]}
    code, text = run(["complex", "betti"], json.dumps(hollow), monkeypatch)
    assert code == 0 and json.loads(text)["betti"] == [0, 1]


def test_impure_complex_shelling_exit_3(monkeypatch):
    impure = {"facets": [[{"p": 1, "label": "1"}, {"p": 2, "label": "1"}], [{"p": 3, "label": "1"}]]}
    code, _ = run(["complex", "check-shelling", "--order", "face-pseudo"], json.dumps(impure), monkeypatch)
    assert code == 3


def test_malformed_input_exit_1(tmp_path, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "edges": [[1, 9]]}')
    assert run(["graph", "diam", "--graph", str(bad)])[0] == 1
    assert run(["complex", "betti"], "not json", monkeypatch)[0] == 1
    assert run(["graph", "diam", "--graph", "blob:3"])[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["graph", "diam"])
    assert info.value.code == 1


def test_simulate_flood_k3():
    code, text = run(["simulate", "flood", "--graph", "complete:3", "--t", "1", "--k", "1"])
    doc = json.loads(text)
    assert code == 0 and doc["agree"] and doc["horizon"] == 2
    io.validate(doc, "simulate")


def test_simulate_flood_too_short_exit_3():
    code, text = run(["simulate", "flood", "--graph", "complete:3", "--t", "1", "--k", "1", "--horizon", "1"])
    assert code == 3 and json.loads(text)["first_violation"] is not None


def test_simulate_run_transcript(tmp_path):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"graph": "complete:3", "t": 1, "k": 1, "rounds": 1, "inputs": {"1": 1, "2": 2, "3": 3},
                              "failures": [{"p": 1, "round": 1, "receivers": [2]}]}))
    code, text = run(["simulate", "run", "--scenario", str(sc), "--transcript"])
    doc = json.loads(text)
    assert code == 0 and [v["p"] for v in doc["views"]] == [2, 3]
    senders = {(m["sender"], m["receiver"]) for m in doc["transcript"]}
    assert (1, 2) in senders and (1, 3) not in senders


def test_solve_scan_k3():
    code, text = run(["solve", "scan", "--graph", "complete:3", "--t", "1", "--k", "1", "--rmax", "3"])
    doc = json.loads(text)
    assert code == 0 and doc["exact"] == 2
    io.validate(doc, "solve")


def test_solve_scan_budget_exit_2(monkeypatch):
    monkeypatch.setenv("KSETLAB_BUDGET", "10")
    code, text = run(["solve", "scan", "--graph", "complete:3", "--t", "1", "--k", "1", "--rmax", "2"])
    assert code == 2 and json.loads(text)["budget_hit"] is True


def test_solve_bounds_and_dominance():
    _, text = run(["solve", "bounds", "--graph", "cycle:5", "--t", "1", "--k", "1"])
    assert json.loads(text)["upper"] == 4
    _, text = run(["solve", "dominance", "--graph", "cycle:6", "--t", "0", "--k", "1", "--r", "1"])
    assert json.loads(text)["holds"] is True


def test_carrier_check_clique_passes_and_ring_fails():
    code, text = run(["carrier", "check", "--map", "f-general", "--graph", "complete:4", "--k", "1"])
    doc = json.loads(text)
    io.validate(doc, "carrier")
    assert code == 0
    assert {p["property"] for p in doc["properties"]} >= {"MONOTONE", "STRICT", "CODIM", "SHELLING"}
    assert all(p["assumption_flags"] == {"rho_choice": "sigma"} for p in doc["properties"])
    code, text = run(["carrier", "check", "--map", "f-general", "--graph", "ring:4", "--k", "1"])
    status = {p["property"]: p["status"] for p in json.loads(text)["properties"]}
    assert code == 3 and status["STRICT"] == "FAIL" and status["MONOTONE"] == "PASS"


def test_carrier_check_g_reports_conditions():
    code, text = run(["carrier", "check", "--map", "g", "--graph", "cycle:4", "--k", "1", "--t", "1", "--R", "0"])
    doc = json.loads(text)
    io.validate(doc, "carrier")
    assert code == 0 and doc["conditions"]["C1"] == "PASS" and doc["conditions"]["C2"] == "PASS"


@pytest.mark.parametrize("argv", [
    ["simulate", "flood", "--graph", "cycle:4", "--t", "1", "--k", "1"],
    ["solve", "scan", "--graph", "complete:3", "--t", "1", "--k", "1", "--rmax", "3"],
])
def test_jobs_do_not_change_output(argv):
    one = sh(argv + ["--jobs", "1"])
    three = sh(argv + ["--jobs", "3"])
    assert one.returncode == three.returncode == 0
    assert one.stdout == three.stdout


def test_dot_export(tmp_path):
    dot = tmp_path / "g.dot"
    run(["graph", "diam", "--graph", "cycle:4", "--dot", str(dot)])
    assert dot.read_text().startswith("digraph")
