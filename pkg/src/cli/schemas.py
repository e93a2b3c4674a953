"""Output documents of the command line; every exact value is a `p/q` string."""

from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from src.cli.formatting import decimal12, pq
from src.engine.candidates import CandidateSet
from src.engine.coverage import ErrorCriterion, PopulationFrame
from src.engine.sizing import SampleSizeResult, TraceRecord

SCHEMA_VERSION = "1.0"


class ExactValue(BaseModel):
    exact: str
    decimal: str

    @classmethod
    def of(cls, value: Fraction) -> "ExactValue":
        return cls(exact=pq(value), decimal=decimal12(value))


class RequestEcho(BaseModel):
    N: int
    L: Optional[int] = None
    U: Optional[int] = None
    n: Optional[int] = None
    criterion: Dict[str, Optional[str]]
    delta: Optional[str] = None
    search_mode: Optional[str] = None

    @classmethod
    def of(cls, frame: PopulationFrame, crit: ErrorCriterion, **extra: Any) -> "RequestEcho":
        return cls(N=frame.N, L=frame.L, U=frame.U, criterion=crit.describe(), **extra)


class TraceRow(BaseModel):
    n: int
    worst_M: int
    min_coverage: str
    evaluations: int
    satisfied: bool

    @classmethod
    def of(cls, record: TraceRecord) -> "TraceRow":
        return cls(
            n=record.n,
            worst_M=record.worst_M,
            min_coverage=pq(record.min_coverage),
            evaluations=record.evaluations,
            satisfied=record.satisfied,
        )


class SizeResultFields(BaseModel):
    n_min: int
    worst_M: int
    min_coverage: ExactValue
    coverage_evaluations: int
    candidates_at_n_min: int
    evaluation_bound: Optional[int]
    full_scan_evaluations_at_n_min: int


class SizeRecord(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str = "size"
    request: RequestEcho
    result: SizeResultFields
    trace: Optional[List[TraceRow]] = None
    timing: Dict[str, float]

    @classmethod
    def build(
        cls,
        request: RequestEcho,
        result: SampleSizeResult,
        frame: PopulationFrame,
        absolute: bool,
        elapsed: float,
        trace: Optional[List[TraceRecord]] = None,
    ) -> "SizeRecord":
        fields = SizeResultFields(
            n_min=result.n_min,
            worst_M=result.worst_M,
            min_coverage=ExactValue.of(result.min_coverage),
            coverage_evaluations=result.coverage_evaluations,
            candidates_at_n_min=result.candidates_at_n_min,
            evaluation_bound=result.n_min + 2 if absolute else None,
            full_scan_evaluations_at_n_min=frame.width,
        )
        return cls(
            request=request,
            result=fields,
            trace=None if trace is None else [TraceRow.of(r) for r in trace],
            timing={"elapsed_seconds": round(elapsed, 6)},
        )


class CoverageRow(BaseModel):
    M: int
    g: int
    h: int
    coverage: str
    coverage_decimal: str


class CoverageRecord(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str = "coverage"
    request: RequestEcho
    rows: List[CoverageRow]


class MemberRow(BaseModel):
    M: int
    provenance: str


class CandidateRecord(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str = "candidates"
    request: RequestEcho
    rule: str
    fallback: bool
    fallback_reason: Optional[str]
    size: int
    bound: ExactValue
    members: List[MemberRow]

    @classmethod
    def build(
        cls, request: RequestEcho, members: CandidateSet, reason: Optional[str]
    ) -> "CandidateRecord":
        return cls(
            request=request,
            rule=members.rule.value,
            fallback=members.fallback,
            fallback_reason=reason,
            size=len(members.members),
            bound=ExactValue.of(members.bound),
            members=[MemberRow(M=m, provenance=tag.value) for m, tag in members.tagged()],
        )


class ErrorBody(BaseModel):
    code: str
    message: str
    details: Dict[str, Any] = {}


class ErrorRecord(BaseModel):
    schema_version: str = SCHEMA_VERSION
    error: ErrorBody
