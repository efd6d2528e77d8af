# services/codec.py
# JSON documents for spaces, admissible maps, glued spaces, diagrams,
# coarse structures and graphs, plus canonical writers.

from __future__ import annotations
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union
import json

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from services.coarse import CoarseStructure, Relation, build_structure
from services.errors import DocumentError, PreconditionError
from services.glueing import AdmissibleMap, SumSpace, check_pair, empty_map, glue, make_admissible
from services.limits import LimitResult, SumDiagram, make_diagram
from services.spaces import FiniteSpace, SpaceMap, from_closures, label_text, same_topology

Label = Union[int, str]
M = TypeVar("M", bound=BaseModel)


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpaceDoc(_Doc):
    points: List[Label]
    closure: Dict[str, List[Label]] = Field(default_factory=dict)


class AdmissibleDoc(_Doc):
    source: Optional[SpaceDoc] = None
    target: Optional[SpaceDoc] = None
    gen: Dict[str, List[Label]] = Field(default_factory=dict)


class ObjectDoc(_Doc):
    right: SpaceDoc
    f: Dict[str, List[Label]] = Field(default_factory=dict)
    g: Dict[str, List[Label]] = Field(default_factory=dict)


class ArrowDoc(_Doc):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    phi: Dict[str, Label]


class DiagramDoc(_Doc):
    base: SpaceDoc
    objects: Dict[str, ObjectDoc]
    arrows: List[ArrowDoc] = Field(default_factory=list)


class StructureDoc(_Doc):
    ground: List[Label]
    generators: List[List[Tuple[Label, Label]]] = Field(default_factory=list)


class RelationDoc(_Doc):
    pairs: List[Tuple[Label, Label]] = Field(default_factory=list)


class GraphDoc(_Doc):
    vertices: List[Any]
    edges: List[Tuple[Any, Any]] = Field(default_factory=list)
    basepoint: Optional[Any] = None

    def vertex_list(self) -> List[Any]:
        return [_freeze(v) for v in self.vertices]

    def edge_list(self) -> List[Tuple[Any, Any]]:
        return [(_freeze(u), _freeze(v)) for u, v in self.edges]

    def base(self) -> Optional[Any]:
        return None if self.basepoint is None else _freeze(self.basepoint)


def _freeze(v: Any) -> Any:
    return tuple(_freeze(x) for x in v) if isinstance(v, list) else v


# ---------- reading ----------
def read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                            {"file": path, "line": e.lineno, "column": e.colno})
    except OSError as e:
        raise DocumentError(f"{path}: {e.strerror}", {"file": path})


def parse(model: Type[M], data: Any, source: str = "<input>") -> M:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        errors = [{"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]} for err in e.errors()]
        raise DocumentError(f"{source}: {len(errors)} field error(s), first at {errors[0]['field']}",
                            {"file": source, "errors": errors})


def load(model: Type[M], path: str) -> M:
    return parse(model, read_json(path), path)


def load_graph_doc(path: str) -> GraphDoc:
    return load(GraphDoc, path)


def _lookup(space: FiniteSpace, text_or_label: Label) -> Any:
    key = label_text(text_or_label)
    for p in space.points:
        if label_text(p) == key:
            return p
    raise PreconditionError(f"unknown point {key}", {"point": key})


def to_space(doc: SpaceDoc) -> FiniteSpace:
    by_text = {label_text(p): p for p in doc.points}
    if len(by_text) != len(doc.points):
        raise DocumentError("points must be distinct", {"field": "points"})
    for key in doc.closure:
        if key not in by_text:
            raise DocumentError(f"closure lists unknown point {key}", {"field": f"closure.{key}"})
    closure = {by_text[k]: [by_text.get(label_text(q), q) for q in v] for k, v in doc.closure.items()}
    return from_closures(doc.points, closure)


def _gen_table(X: FiniteSpace, Y: FiniteSpace, gen: Dict[str, List[Label]]) -> Dict[Any, List[Any]]:
    table = {_lookup(X, k): [_lookup(Y, q) for q in v] for k, v in gen.items()}
    for p in X.points:
        table.setdefault(p, [])
    return table


def to_admissible(doc: AdmissibleDoc, X: Optional[FiniteSpace] = None, Y: Optional[FiniteSpace] = None) -> AdmissibleMap:
    src = to_space(doc.source) if doc.source is not None else X
    tgt = to_space(doc.target) if doc.target is not None else Y
    if src is None or tgt is None:
        raise DocumentError("admissible map needs a source and a target space")
    if X is not None and not same_topology(src, X):
        raise DocumentError("map source does not match the left space", {"field": "source"})
    if Y is not None and not same_topology(tgt, Y):
        raise DocumentError("map target does not match the right space", {"field": "target"})
    X, Y = X or src, Y or tgt
    return make_admissible(X, Y, _gen_table(X, Y, doc.gen))


def to_diagram(doc: DiagramDoc) -> SumDiagram:
    base = to_space(doc.base)
    objects: Dict[str, SumSpace] = {}
    for name, obj in doc.objects.items():
        right = to_space(obj.right)
        f = make_admissible(base, right, _gen_table(base, right, obj.f))
        g = make_admissible(right, base, _gen_table(right, base, obj.g)) if obj.g else empty_map(right, base)
        objects[name] = glue(base, right, check_pair(f, g))
    arrows = {}
    for a in doc.arrows:
        if a.source not in objects or a.target not in objects:
            raise DocumentError(f"arrow {a.source}->{a.target} names an unknown object", {"field": "arrows"})
        src, tgt = objects[a.source].right, objects[a.target].right
        mapping = {_lookup(src, k): _lookup(tgt, v) for k, v in a.phi.items()}
        arrows[(a.source, a.target)] = SpaceMap.from_labels(src, tgt, mapping)
    return make_diagram(base, objects, arrows)


def to_structure(doc: StructureDoc) -> CoarseStructure:
    return build_structure(doc.ground, [[(a, b) for a, b in gen] for gen in doc.generators])


def ground_label(cs: CoarseStructure, text_or_label: Label) -> Any:
    key = label_text(text_or_label)
    for p in cs.ground:
        if label_text(p) == key:
            return p
    raise PreconditionError(f"unknown ground point {key}", {"point": key})


def to_relation(doc: RelationDoc, cs: CoarseStructure) -> Relation:
    return cs.relation((ground_label(cs, a), ground_label(cs, b)) for a, b in doc.pairs)


# ---------- writing ----------
def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def space_to_doc(space: FiniteSpace) -> Dict[str, Any]:
    return {"points": sorted(label_text(p) for p in space.points), "closure": space.closure_table()}


def map_to_doc(f: AdmissibleMap) -> Dict[str, Any]:
    return {"source": space_to_doc(f.source), "target": space_to_doc(f.target), "gen": f.table()}


def sum_to_doc(s: SumSpace) -> Dict[str, Any]:
    n = s.left.n
    return {
        "total": space_to_doc(s.total),
        "left": sorted(label_text(p) for p in s.total.points[:n]),
        "right": sorted(label_text(p) for p in s.total.points[n:]),
        "f": s.f.table(),
        "g": s.g.table(),
    }


def limit_to_doc(result: LimitResult) -> Dict[str, Any]:
    return {
        "full": sum_to_doc(result.full),
        "dense": None if result.dense is None else sum_to_doc(result.dense),
        "projections": {
            c: {label_text(k): label_text(v) for k, v in m.phi.as_labels().items()}
            for c, m in result.projections.items()
        },
    }
