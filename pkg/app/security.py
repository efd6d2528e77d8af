# security.py
import os
import secrets
from typing import Optional

from fastapi import Header, HTTPException


def _reject(kind: str, message: str) -> HTTPException:
    return HTTPException(401, {"kind": kind, "message": message})


def require_glue_token(authorization: Optional[str] = Header(None)) -> None:
    """Guards /laws.run, which can burn a lot of CPU; an empty GLUE_TOKEN turns the guard off."""
    expected = os.getenv("GLUE_TOKEN", "")
    if not expected:
        return
    scheme, _, token = (authorization or "").partition(" ")
    if scheme.lower() != "bearer" or not token:
        raise _reject("auth.missing", "bearer token required")
    if not secrets.compare_digest(token.strip(), expected):
        raise _reject("auth.invalid", "glue token rejected")
