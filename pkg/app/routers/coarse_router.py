# routers/coarse_router.py
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field
from typing import List, Literal, Optional

from services.codec import Label, RelationDoc, StructureDoc, ground_label, to_relation, to_structure
from services.coarse import controlled, is_bounded, preceq, sim, structure_report
from services.errors import GlueError

router = APIRouter(prefix="", tags=["coarse"])


class CoarseReq(BaseModel):
    structure: StructureDoc
    op: Literal["controlled", "bounded", "preceq", "sim", "classes"]
    relation: Optional[RelationDoc] = None
    a: List[Label] = Field(default_factory=list)
    b: List[Label] = Field(default_factory=list)


@router.post("/coarse.check")
def coarse_check(req: CoarseReq):
    try:
        cs = to_structure(req.structure)
        a = cs.mask_of(ground_label(cs, p) for p in req.a)
        b = cs.mask_of(ground_label(cs, p) for p in req.b)
        if req.op == "controlled":
            result = controlled(cs, to_relation(req.relation or RelationDoc(), cs))
        elif req.op == "bounded":
            result = is_bounded(cs, a)
        elif req.op == "preceq":
            result = preceq(cs, a, b)
        elif req.op == "sim":
            result = sim(cs, a, b)
        else:
            return {"op": req.op, **structure_report(cs)}
    except GlueError as e:
        raise HTTPException(400, e.report())
    return {"op": req.op, "result": result}
