# tests/test_cli.py
import json

import services.glueing as glueing
import services.laws as laws
from cli import EXIT_INVALID, EXIT_OK, EXIT_VIOLATION, main


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)

# ---------- ends ----------

def test_ends_line(capsys):
    assert main(["ends", "--graph", "line", "--depth", "5", "--horizon", "25"]) == EXIT_OK
    assert capsys.readouterr().out == "ends: 2 (certified)\n"

def test_ends_writes_dot(tmp_path, capsys):
    dot = tmp_path / "ends.dot"
    assert main(["ends", "--graph", "star:3", "--depth", "4", "--horizon", "12", "--dot", str(dot)]) == EXIT_OK
    assert capsys.readouterr().out == "ends: 3 (certified)\n"
    assert dot.read_text().startswith("digraph ends {")

def test_ends_bad_horizon(capsys):
    assert main(["ends", "--graph", "line", "--depth", "5", "--horizon", "3"]) == EXIT_INVALID
    assert json.loads(capsys.readouterr().err)["kind"] == "precondition"

# ---------- glue ----------

def test_glue_writes_sum(tmp_path):
    left = _write(tmp_path, "x.json", {"points": ["s0", "s1"], "closure": {"s1": ["s0", "s1"]}})
    right = _write(tmp_path, "y.json", {"points": ["y"]})
    f = _write(tmp_path, "f.json", {"gen": {"s1": ["y"]}})
    out = tmp_path / "sum.json"
    assert main(["glue", "--left", left, "--right", right, "--f", f, "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["total"]["closure"]["L:s1"] == ["L:s0", "L:s1", "R:y"]

def test_glue_rejects_non_monotone_map(tmp_path, capsys):
    left = _write(tmp_path, "x.json", {"points": ["s0", "s1"], "closure": {"s1": ["s0", "s1"]}})
    right = _write(tmp_path, "y.json", {"points": ["y"]})
    f = _write(tmp_path, "f.json", {"gen": {"s0": ["y"]}})
    assert main(["glue", "--left", left, "--right", right, "--f", f]) == EXIT_INVALID
    err = json.loads(capsys.readouterr().err)
    assert err["kind"] == "admissible.invalid"
    assert err["witness"]["points"] == ["s0", "s1"]

def test_glue_reports_malformed_json(tmp_path, capsys):
    bad = tmp_path / "x.json"
    bad.write_text("{")
    right = _write(tmp_path, "y.json", {"points": ["y"]})
    assert main(["glue", "--left", str(bad), "--right", right, "--f", right]) == EXIT_INVALID
    assert json.loads(capsys.readouterr().err)["witness"]["line"] == 1

# ---------- usage ----------

def test_unknown_flag_exits_one(capsys):
    assert main(["ends", "--graph", "line", "--depth", "1", "--horizon", "4", "--colour", "red"]) == EXIT_INVALID
    assert "unrecognized arguments" in capsys.readouterr().err

def test_missing_command_exits_one():
    assert main([]) == EXIT_INVALID

# ---------- verify-laws ----------

def test_verify_laws_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify-laws", "--suite", "coarse", "--trials", "3", "--seed", "11", "--out", str(a)]) == EXIT_OK
    assert main(["verify-laws", "--suite", "coarse", "--trials", "3", "--seed", "11", "--jobs", "2",
                 "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["passed"] is True

def test_verify_laws_reports_violation(tmp_path, monkeypatch):
    monkeypatch.setattr(laws, "EXHAUSTIVE_POINTS", 2)
    monkeypatch.setattr(glueing, "_monotone_witness", lambda X, gen: None)
    out = tmp_path / "r.json"
    assert main(["verify-laws", "--suite", "glueing", "--trials", "60", "--seed", "1", "--out", str(out)]) == EXIT_VIOLATION
    assert json.loads(out.read_text())["passed"] is False

# ---------- limits and coarse ----------

def test_limits_command(tmp_path):
    diagram = _write(tmp_path, "d.json", {
        "base": {"points": ["x1", "x2"]},
        "objects": {
            "A": {"right": {"points": ["a-", "a+"]}, "f": {"x1": ["a-"], "x2": ["a+"]}},
            "B": {"right": {"points": ["b-", "b+"]}, "f": {"x1": ["b-"], "x2": ["b+"]}},
        },
    })
    out = tmp_path / "limit.json"
    assert main(["limits", "--diagram", diagram, "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["full"]["right"]) == 4 and len(doc["dense"]["right"]) == 2

def test_coarse_check_ops(tmp_path, capsys):
    structure = _write(tmp_path, "c.json", {"ground": ["a", "b", "c"], "generators": [[["a", "b"]]]})
    relation = _write(tmp_path, "r.json", {"pairs": [["b", "a"]]})
    assert main(["coarse-check", "--structure", structure, "--op", "controlled", "--relation", relation]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["result"] is True
    assert main(["coarse-check", "--structure", structure, "--op", "bounded", "--a", "a,c"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["result"] is False
    assert main(["coarse-check", "--structure", structure, "--op", "classes"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["classes"] == [["a", "b"], ["c"]]

def test_coarse_check_needs_sets(tmp_path, capsys):
    structure = _write(tmp_path, "c.json", {"ground": ["a"]})
    assert main(["coarse-check", "--structure", structure, "--op", "sim", "--a", "a"]) == EXIT_INVALID
    assert json.loads(capsys.readouterr().err)["kind"] == "precondition"
