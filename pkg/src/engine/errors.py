"""Structured errors raised by the sample-size engine."""

from typing import Any, Dict, Optional


class SampleSizeError(Exception):
    """Base class for engine errors that carry a stable code and structured details."""

    code = "sample_size_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


class InfeasibleCriterionError(SampleSizeError):
    """No sample size can meet the requirement because some M has coverage 0 for every n."""

    code = "infeasible"


class UnreachableSampleSizeError(SampleSizeError):
    """No n in [2, N] meets the requirement."""

    code = "unreachable"


class CandidatePreconditionError(SampleSizeError):
    """The mixed-criterion breakpoint does not lie strictly inside the frame."""

    code = "candidate_precondition"
