# tests/test_codec.py
import json

import pytest

from services.codec import (
    AdmissibleDoc, ArrowDoc, DiagramDoc, GraphDoc, RelationDoc, SpaceDoc, StructureDoc, dumps, limit_to_doc, load,
    parse, read_json, sum_to_doc, to_admissible, to_diagram, to_relation, to_space, to_structure,
)
from services.coarse import controlled
from services.errors import AdmissibleError, DocumentError, PreconditionError
from services.glueing import glue_one_sided
from services.limits import sum_limit

CHAIN = {"points": ["s0", "s1"], "closure": {"s1": ["s0", "s1"]}}

# ---------- reading ----------

def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"points": [\n  "a",\n}')
    with pytest.raises(DocumentError) as e:
        read_json(str(path))
    assert e.value.witness["line"] == 3

def test_missing_file(tmp_path):
    with pytest.raises(DocumentError):
        read_json(str(tmp_path / "nope.json"))

def test_extra_fields_are_rejected():
    with pytest.raises(DocumentError) as e:
        parse(SpaceDoc, {"points": ["a"], "colour": "red"})
    assert e.value.witness["errors"][0]["field"] == "colour"

def test_arrow_uses_from_and_to():
    a = parse(ArrowDoc, {"from": "c0", "to": "c1", "phi": {"y": "w"}})
    assert (a.source, a.target) == ("c0", "c1")

# ---------- spaces and maps ----------

def test_space_doc_defaults_to_singleton_closures():
    X = to_space(parse(SpaceDoc, CHAIN))
    assert X.down == (0b01, 0b11)

def test_closure_key_must_be_a_point():
    with pytest.raises(DocumentError):
        to_space(parse(SpaceDoc, {"points": ["a"], "closure": {"b": ["a"]}}))

def test_integer_labels():
    X = to_space(parse(SpaceDoc, {"points": [0, 1], "closure": {"1": [0, 1]}}))
    assert X.points == (0, 1) and X.down == (0b01, 0b11)

def test_admissible_doc_against_given_spaces():
    X = to_space(parse(SpaceDoc, CHAIN))
    Y = to_space(parse(SpaceDoc, {"points": ["y"]}))
    f = to_admissible(parse(AdmissibleDoc, {"gen": {"s1": ["y"]}}), X, Y)
    assert f.gen == (0b0, 0b1)
    with pytest.raises(AdmissibleError):
        to_admissible(parse(AdmissibleDoc, {"gen": {"s0": ["y"]}}), X, Y)

def test_admissible_doc_source_must_match():
    X = to_space(parse(SpaceDoc, CHAIN))
    Y = to_space(parse(SpaceDoc, {"points": ["y"]}))
    doc = parse(AdmissibleDoc, {"source": {"points": ["s0", "s1"]}, "gen": {}})
    with pytest.raises(DocumentError):
        to_admissible(doc, X, Y)

def test_admissible_doc_unknown_point():
    X = to_space(parse(SpaceDoc, CHAIN))
    Y = to_space(parse(SpaceDoc, {"points": ["y"]}))
    with pytest.raises(PreconditionError):
        to_admissible(parse(AdmissibleDoc, {"gen": {"s1": ["z"]}}), X, Y)

# ---------- diagrams ----------

DIAGRAM = {
    "base": {"points": ["x1", "x2"]},
    "objects": {
        "A": {"right": {"points": ["a-", "a+"]}, "f": {"x1": ["a-"], "x2": ["a+"]}},
        "B": {"right": {"points": ["b-", "b+"]}, "f": {"x1": ["b-"], "x2": ["b+"]}},
    },
}

def test_diagram_doc_builds_limit():
    d = to_diagram(parse(DiagramDoc, DIAGRAM))
    doc = limit_to_doc(sum_limit(d))
    assert doc["dense"]["right"] == ["R:(a+,b+)", "R:(a-,b-)"]
    assert len(doc["full"]["right"]) == 4
    assert doc["projections"]["A"]["(a-,b+)"] == "a-"

def test_diagram_arrow_to_unknown_object():
    bad = dict(DIAGRAM, arrows=[{"from": "A", "to": "C", "phi": {}}])
    with pytest.raises(DocumentError):
        to_diagram(parse(DiagramDoc, bad))

# ---------- structures and graphs ----------

def test_structure_and_relation_docs():
    cs = to_structure(parse(StructureDoc, {"ground": ["a", "b", "c"], "generators": [[["a", "b"]]]}))
    assert controlled(cs, to_relation(parse(RelationDoc, {"pairs": [["b", "a"]]}), cs))
    assert not controlled(cs, to_relation(parse(RelationDoc, {"pairs": [["a", "c"]]}), cs))
    with pytest.raises(PreconditionError):
        to_relation(parse(RelationDoc, {"pairs": [["a", "z"]]}), cs)

def test_graph_doc_freezes_list_vertices():
    doc = parse(GraphDoc, {"vertices": [[0, 0], [0, 1]], "edges": [[[0, 0], [0, 1]]], "basepoint": [0, 1]})
    assert doc.vertex_list() == [(0, 0), (0, 1)]
    assert doc.edge_list() == [((0, 0), (0, 1))]
    assert doc.base() == (0, 1)

# ---------- writing ----------

def test_sum_doc_is_canonical(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps(CHAIN))
    X = load(SpaceDoc, str(path))
    X = to_space(X)
    Y = to_space(parse(SpaceDoc, {"points": ["y"]}))
    f = to_admissible(parse(AdmissibleDoc, {"gen": {"s1": ["y"]}}), X, Y)
    text = dumps(sum_to_doc(glue_one_sided(X, Y, f)))
    doc = json.loads(text)
    assert doc["left"] == ["L:s0", "L:s1"] and doc["right"] == ["R:y"]
    assert doc["total"]["closure"]["L:s1"] == ["L:s0", "L:s1", "R:y"]
    assert doc["f"] == {"s0": [], "s1": ["y"]}
    assert text == dumps(json.loads(text))
