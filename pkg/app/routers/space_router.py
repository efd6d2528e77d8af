# routers/space_router.py
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field
from typing import List

from services.codec import Label, SpaceDoc, space_to_doc, to_space
from services.errors import GlueError, PreconditionError
from services.spaces import closure, connected_components, enumerate_closed_sets, interior, label_text

router = APIRouter(prefix="", tags=["spaces"])


@router.post("/spaces.validate")
def spaces_validate(req: SpaceDoc):
    try:
        X = to_space(req)
    except GlueError as e:
        raise HTTPException(400, e.report())
    comps = [sorted(label_text(p) for p in X.labels_of(c)) for c in connected_components(X)]
    return {"ok": True, "space": space_to_doc(X), "components": comps}


class ClosureReq(BaseModel):
    space: SpaceDoc
    subset: List[Label] = Field(default_factory=list)


@router.post("/spaces.closure")
def spaces_closure(req: ClosureReq):
    try:
        X = to_space(req.space)
        wanted = {label_text(p) for p in req.subset}
        a = X.mask_of(p for p in X.points if label_text(p) in wanted)
        if len(wanted) != bin(a).count("1"):
            raise PreconditionError("subset names unknown points", {"subset": sorted(wanted)})
        c, i = closure(X, a), interior(X, a)
        closed_sets = len(enumerate_closed_sets(X))
    except GlueError as e:
        raise HTTPException(400, e.report())
    return {
        "closure": sorted(label_text(p) for p in X.labels_of(c)),
        "interior": sorted(label_text(p) for p in X.labels_of(i)),
        "closed": c == a,
        "closed_sets": closed_sets,
    }
