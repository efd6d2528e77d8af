# routers/glue_router.py
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field
from typing import Dict, List, Optional

from services.codec import AdmissibleDoc, DiagramDoc, Label, SpaceDoc, limit_to_doc, sum_to_doc, to_admissible, to_diagram, to_space
from services.errors import GlueError
from services.glueing import check_pair, decompose, empty_map, glue, is_dense_left, is_dense_right, split_space
from services.limits import sum_limit
from services.spaces import is_open_set, label_text

router = APIRouter(prefix="", tags=["glueing"])


class GlueReq(BaseModel):
    left: SpaceDoc
    right: SpaceDoc
    f: Dict[str, List[Label]] = Field(default_factory=dict)
    g: Optional[Dict[str, List[Label]]] = None


@router.post("/glue")
def glue_spaces(req: GlueReq):
    try:
        X, Y = to_space(req.left), to_space(req.right)
        f = to_admissible(AdmissibleDoc(gen=req.f), X, Y)
        g = to_admissible(AdmissibleDoc(gen=req.g), Y, X) if req.g else empty_map(Y, X)
        s = glue(X, Y, check_pair(f, g))
    except GlueError as e:
        raise HTTPException(400, e.report())
    return {"sum": sum_to_doc(s), "dense_left": is_dense_left(s), "dense_right": is_dense_right(s)}


class DecomposeReq(BaseModel):
    space: SpaceDoc
    left: List[Label]
    require_open: bool = True


@router.post("/glue.decompose")
def glue_decompose(req: DecomposeReq):
    try:
        Z = to_space(req.space)
        wanted = {label_text(p) for p in req.left}
        xs = Z.mask_of(p for p in Z.points if label_text(p) in wanted)
        pair = decompose(Z, xs) if req.require_open else split_space(Z, xs)
    except GlueError as e:
        raise HTTPException(400, e.report())
    return {"open": is_open_set(Z, xs), "f": pair.f.table(), "g": pair.g.table()}


@router.post("/limits")
def limits(req: DiagramDoc):
    try:
        result = sum_limit(to_diagram(req))
    except GlueError as e:
        raise HTTPException(400, e.report())
    return limit_to_doc(result)
