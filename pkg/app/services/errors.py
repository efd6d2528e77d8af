# services/errors.py
from __future__ import annotations
from typing import Any, Dict, Optional


class GlueError(Exception):
    """Base for every failure the engine reports to a caller."""

    kind = "error"

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.witness = witness or {}

    def report(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind, "message": self.message}
        if self.witness:
            out["witness"] = self.witness
        return out


class SpaceValidationError(GlueError):
    kind = "space.invalid"

    def __init__(self, axiom: str, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message, witness)
        self.axiom = axiom

    def report(self) -> Dict[str, Any]:
        out = super().report()
        out["axiom"] = self.axiom
        return out


class AdmissibleError(GlueError):
    kind = "admissible.invalid"


class PairError(GlueError):
    kind = "pair.invalid"


class CapacityError(GlueError):
    kind = "capacity"


class OracleRefusal(GlueError):
    kind = "oracle.refused"


class PreconditionError(GlueError):
    kind = "precondition"


class SpaceMismatch(GlueError):
    kind = "space.mismatch"


class DiagramError(GlueError):
    kind = "diagram.invalid"


class PresentationError(GlueError):
    kind = "graph.presentation"


class ProperMapError(GlueError):
    kind = "graph.not_proper"


class InvariantViolation(GlueError):
    kind = "invariant"


class SaturationOverflow(GlueError):
    kind = "saturation.overflow"


class NotCoarseError(GlueError):
    kind = "coarse.not_coarse"


class UnknownSuite(GlueError):
    kind = "laws.unknown_suite"


class DocumentError(GlueError):
    kind = "document.malformed"
