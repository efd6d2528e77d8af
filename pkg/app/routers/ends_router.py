# routers/ends_router.py
from fastapi import APIRouter, HTTPException, Query

from services.ends import end_count, graph_from_spec
from services.errors import GlueError

router = APIRouter(prefix="", tags=["ends"])

MAX_HORIZON = 64


@router.get("/ends")
def ends(graph: str, depth: int = Query(5, ge=0), horizon: int = Query(25, ge=1, le=MAX_HORIZON)):
    if graph.startswith("file:"):
        raise HTTPException(400, {"kind": "precondition", "message": "file graphs are CLI-only"})
    try:
        result = end_count(graph_from_spec(graph), depth, horizon)
    except GlueError as e:
        raise HTTPException(400, e.report())
    return {"graph": result.graph, "count": result.count, "certified": result.certified,
            "stage_sizes": list(result.stage_sizes), "line": result.line()}
