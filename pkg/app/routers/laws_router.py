# routers/laws_router.py
from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field
import os

from security import require_glue_token
from services.errors import GlueError
from services.harness import run_laws

router = APIRouter(prefix="", tags=["laws"])

MAX_API_TRIALS = int(os.getenv("GLUE_MAX_API_TRIALS", "500"))


class LawsReq(BaseModel):
    suite: str = "all"
    trials: int = Field(default=50, ge=0)
    seed: int = Field(default=0, ge=0)
    jobs: int = Field(default=1, ge=1, le=8)


@router.post("/laws.run", dependencies=[Depends(require_glue_token)])
def laws_run(req: LawsReq):
    if req.trials > MAX_API_TRIALS:
        raise HTTPException(400, {"kind": "precondition", "message": f"trials above {MAX_API_TRIALS}"})
    try:
        report = run_laws(req.suite, req.trials, req.seed, jobs=req.jobs)
    except GlueError as e:
        raise HTTPException(400, e.report())
    return report.to_dict()
