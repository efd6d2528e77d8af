# tests/test_routers.py
import pytest
from fastapi.testclient import TestClient

from glue_server import app

client = TestClient(app)

CHAIN = {"points": ["s0", "s1"], "closure": {"s1": ["s0", "s1"]}}

# ---------- health ----------

def test_health():
    assert client.get("/health").json() == {"ok": True}

# ---------- spaces ----------

def test_validate_space():
    r = client.post("/spaces.validate", json=CHAIN)
    assert r.status_code == 200
    assert r.json()["components"] == [["s0", "s1"]]

def test_validate_reports_failed_axiom():
    bad = {"points": ["a", "b", "c"], "closure": {"a": ["a"], "b": ["a", "b"], "c": ["b", "c"]}}
    r = client.post("/spaces.validate", json=bad)
    assert r.status_code == 400
    detail = r.json()["detail"]
    assert detail["kind"] == "space.invalid" and detail["axiom"] == "transitivity"

def test_closure_and_interior():
    r = client.post("/spaces.closure", json={"space": CHAIN, "subset": ["s1"]})
    assert r.json() == {"closure": ["s0", "s1"], "interior": ["s1"], "closed": False, "closed_sets": 3}

def test_closure_of_unknown_point():
    r = client.post("/spaces.closure", json={"space": CHAIN, "subset": ["zz"]})
    assert r.status_code == 400

def test_extra_fields_are_unprocessable():
    assert client.post("/spaces.validate", json={"points": ["a"], "colour": 1}).status_code == 422

# ---------- glueing ----------

def test_glue_endpoint():
    r = client.post("/glue", json={"left": CHAIN, "right": {"points": ["y"]}, "f": {"s0": ["y"], "s1": ["y"]}})
    assert r.status_code == 200
    body = r.json()
    assert body["dense_left"] is True and body["dense_right"] is False
    assert body["sum"]["total"]["closure"]["L:s0"] == ["L:s0", "R:y"]

def test_glue_rejects_bad_pair():
    left, right = {"points": ["x1", "x2"]}, {"points": ["y"]}
    r = client.post("/glue", json={"left": left, "right": right, "f": {"x1": ["y"]}, "g": {"y": ["x2"]}})
    assert r.status_code == 400
    assert r.json()["detail"]["kind"] == "pair.invalid"

def test_decompose_endpoint():
    r = client.post("/glue.decompose", json={"space": CHAIN, "left": ["s1"]})
    assert r.json() == {"open": True, "f": {"s1": ["s0"]}, "g": {"s0": []}}
    assert client.post("/glue.decompose", json={"space": CHAIN, "left": ["s0"]}).status_code == 400
    r = client.post("/glue.decompose", json={"space": CHAIN, "left": ["s0"], "require_open": False})
    assert r.json()["open"] is False

def test_limits_endpoint():
    diagram = {
        "base": {"points": ["x"]},
        "objects": {"A": {"right": {"points": ["a"]}, "f": {"x": ["a"]}}},
    }
    r = client.post("/limits", json=diagram)
    assert r.status_code == 200
    assert r.json()["projections"] == {"A": {"a": "a"}}

# ---------- ends ----------

def test_ends_endpoint():
    r = client.get("/ends", params={"graph": "line", "depth": 5, "horizon": 25})
    assert r.json()["line"] == "ends: 2 (certified)"
    assert r.json()["stage_sizes"] == [2, 2, 2, 2]

def test_ends_rejects_file_graphs():
    assert client.get("/ends", params={"graph": "file:/etc/passwd"}).status_code == 400

def test_ends_unknown_graph():
    r = client.get("/ends", params={"graph": "torus"})
    assert r.status_code == 400 and r.json()["detail"]["kind"] == "precondition"

def test_ends_horizon_cap():
    assert client.get("/ends", params={"graph": "line", "horizon": 1000}).status_code == 422

# ---------- coarse ----------

def test_coarse_check():
    structure = {"ground": ["a", "b", "c"], "generators": [[["a", "b"]]]}
    r = client.post("/coarse.check", json={"structure": structure, "op": "sim", "a": ["a"], "b": ["b"]})
    assert r.json() == {"op": "sim", "result": True}
    r = client.post("/coarse.check", json={"structure": structure, "op": "classes"})
    assert r.json()["classes"] == [["a", "b"], ["c"]]

# ---------- laws ----------

def test_laws_open_without_token(monkeypatch):
    monkeypatch.delenv("GLUE_TOKEN", raising=False)
    r = client.post("/laws.run", json={"suite": "coarse", "trials": 2, "seed": 3})
    assert r.status_code == 200 and r.json()["passed"] is True

@pytest.mark.parametrize("header,status", [(None, 401), ("Bearer wrong", 401), ("Bearer s3cret", 200)])
def test_laws_token_guard(monkeypatch, header, status):
    monkeypatch.setenv("GLUE_TOKEN", "s3cret")
    headers = {"Authorization": header} if header else {}
    r = client.post("/laws.run", json={"suite": "space", "trials": 1}, headers=headers)
    assert r.status_code == status

def test_laws_unknown_suite(monkeypatch):
    monkeypatch.delenv("GLUE_TOKEN", raising=False)
    r = client.post("/laws.run", json={"suite": "geometry", "trials": 1})
    assert r.status_code == 400 and r.json()["detail"]["kind"] == "laws.unknown_suite"
