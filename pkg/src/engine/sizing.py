"""
Minimum sample size search over a population frame.

Coverage is evaluated only at candidate M values, so the work per n depends on n
and not on the population size. The default search walks n upward from 2; the
accelerated search probes and bisects, then confirms that no smaller n passes.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config import config
from src.engine.candidates import (
    CandidateRule,
    candidate_set_absolute,
    candidate_set_for,
    describe_fallback,
    fold_frame,
)
from src.engine.combinatorics import log_window_probability
from src.engine.coverage import (
    CriterionKind,
    ErrorCriterion,
    PopulationFrame,
    acceptance_window,
    coverage,
    to_exact,
)
from src.engine.errors import InfeasibleCriterionError, UnreachableSampleSizeError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


class SearchMode(str, Enum):
    ASCENDING = "ascending"
    ACCELERATED = "accelerated"


class SizingRequest(BaseModel):
    """Frame, criterion and risk delta; the search succeeds once min coverage exceeds 1 - delta."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frame: PopulationFrame
    criterion: ErrorCriterion
    delta: Fraction
    search_mode: SearchMode = Field(default_factory=lambda: SearchMode(config.search_mode))

    @field_validator("delta", mode="before")
    @classmethod
    def _exact_delta(cls, value: Any) -> Fraction:
        delta = to_exact(value)
        if not 0 < delta < 1:
            raise ValueError(f"delta must lie strictly in (0, 1), got {delta}")
        return delta

    @property
    def target(self) -> Fraction:
        return 1 - self.delta


class FrameMinimum(BaseModel):
    """Minimum coverage over a frame at one n, with the work it took."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    worst_M: int
    value: Fraction
    evaluations: int
    candidates: int
    rule: CandidateRule


class TraceRecord(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    worst_M: int
    min_coverage: Fraction
    evaluations: int
    satisfied: bool


class SampleSizeResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_min: int
    worst_M: int
    min_coverage: Fraction
    coverage_evaluations: int
    candidates_at_n_min: int


def _resolve_jobs(threads: Optional[int]) -> int:
    jobs = config.threads if threads is None else threads
    if jobs < 0:
        raise ValueError(f"threads must be >= 0, got {jobs}")
    return -1 if jobs == 0 else jobs


def _known_coverage(M: int, crit: ErrorCriterion) -> Optional[Fraction]:
    """Coverage values that need no evaluation: at M = 0 the sample count is always 0."""
    if M != 0:
        return None
    return Fraction(0) if crit.kind is CriterionKind.RELATIVE else Fraction(1)


def _frame_points(
    n: int, frame: PopulationFrame, crit: ErrorCriterion, symmetry: bool
) -> Tuple[List[int], CandidateRule]:
    if symmetry and crit.kind is CriterionKind.ABSOLUTE:
        folded = fold_frame(frame)
        if folded is not None:
            members = candidate_set_absolute(folded, n, crit.eps)
            # Fold members back into [L, U] through M -> N - M
            points = {
                w if frame.L <= w <= frame.U else frame.N - w for w in members.members
            }
            points.add(frame.L)
            return sorted(points), members.rule
    members = candidate_set_for(frame, n, crit)
    return list(members.members), members.rule


def _screen(
    points: List[int], n: int, N: int, crit: ErrorCriterion, guard: float
) -> List[int]:
    """Keep the points whose log-space coverage lies within guard of the approximate minimum."""
    approx = []
    for M in points:
        window = acceptance_window(n, M, N, crit)
        approx.append(log_window_probability(n, window.g, window.h, M, N))
    floor_value = min(approx)
    return [M for M, value in zip(points, approx) if value <= floor_value + guard]


def _evaluate(points: List[int], n: int, N: int, crit: ErrorCriterion, jobs: int) -> List[Fraction]:
    if jobs == 1 or len(points) < 2:
        return [coverage(n, M, N, crit) for M in points]
    return Parallel(n_jobs=jobs, prefer="threads")(
        delayed(coverage)(n, M, N, crit) for M in points
    )


def min_coverage_over_frame(
    n: int,
    frame: PopulationFrame,
    crit: ErrorCriterion,
    *,
    symmetry: bool = True,
    threads: Optional[int] = None,
    fast_path: Optional[bool] = None,
    guard: Optional[float] = None,
) -> FrameMinimum:
    """
    Exact minimum of coverage over M in [L, U], evaluated on the candidate set only.

    Args:
        n: Sample size, 1 <= n <= N
        frame: Population size and knowledge interval
        crit: Error criterion
        symmetry: Fold frames straddling N/2 under the absolute criterion
        threads: Worker threads, 0 for all cores; defaults to config
        fast_path: Pre-screen candidates in log space; defaults to config
        guard: Log-space guard band for the pre-screen; defaults to config

    Returns:
        FrameMinimum whose worst_M is the smallest evaluated M attaining the minimum
    """
    if not 1 <= n <= frame.N:
        raise ValueError(f"sample size n must lie in [1, {frame.N}], got {n}")
    jobs = _resolve_jobs(threads)
    use_fast_path = config.fast_path_enabled if fast_path is None else fast_path
    band = config.fast_path_guard if guard is None else guard

    points, rule = _frame_points(n, frame, crit, symmetry)
    values: Dict[int, Fraction] = {}
    pending = []
    for M in points:
        known = _known_coverage(M, crit)
        if known is None:
            pending.append(M)
        else:
            values[M] = known

    if use_fast_path and len(pending) > 1:
        pending = _screen(pending, n, frame.N, crit, band)

    values.update(zip(pending, _evaluate(pending, n, frame.N, crit, jobs)))
    value, worst_M = min((v, M) for M, v in values.items())
    return FrameMinimum(
        n=n,
        worst_M=worst_M,
        value=value,
        evaluations=len(pending),
        candidates=len(points),
        rule=rule,
    )


class _Search:
    """Memoized per-n evaluation with an ordered trace."""

    def __init__(self, req: SizingRequest, options: Dict[str, Any]):
        self.req = req
        self.options = options
        self.cache: Dict[int, FrameMinimum] = {}
        self.trace: List[TraceRecord] = []

    def passes(self, n: int) -> bool:
        return self.evaluate(n).value > self.req.target

    def evaluate(self, n: int) -> FrameMinimum:
        if n not in self.cache:
            self.cache[n] = min_coverage_over_frame(
                n, self.req.frame, self.req.criterion, **self.options
            )
            self.record(n)
        return self.cache[n]

    def record(self, n: int) -> None:
        fm = self.cache[n]
        satisfied = fm.value > self.req.target
        self.trace.append(
            TraceRecord(
                n=n,
                worst_M=fm.worst_M,
                min_coverage=fm.value,
                evaluations=fm.evaluations,
                satisfied=satisfied,
            )
        )
        logger.debug(
            "Evaluated sample size",
            extra={
                "event": "sizing_step",
                "n": n,
                "worst_M": fm.worst_M,
                "evaluations": fm.evaluations,
                "satisfied": satisfied,
            },
        )

    def first_passing(self, upto: int) -> Optional[int]:
        """Ascending scan of n in [2, upto) that skips already evaluated sizes."""
        for n in range(2, upto):
            if n in self.cache:
                continue
            if self.passes(n):
                return n
        return None

    def ascending(self) -> Optional[int]:
        for n in range(2, self.req.frame.N + 1):
            if self.passes(n):
                return n
        return None

    def accelerated(self) -> Optional[int]:
        N = self.req.frame.N
        lo, hi, probe = 1, None, 2
        while hi is None:
            if self.passes(probe):
                hi = probe
            elif probe == N:
                # nothing probed passes; only a full scan can rule out the rest
                return self.first_passing(N)
            else:
                lo, probe = probe, min(2 * probe, N)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.passes(mid):
                hi = mid
            else:
                lo = mid
        confirmed = self.first_passing(hi)
        if confirmed is not None:
            return confirmed
        if self.trace[-1].n != hi:
            self.record(hi)
        return hi


def _check_request(req: SizingRequest) -> None:
    frame, crit = req.frame, req.criterion
    if crit.kind is CriterionKind.RELATIVE and frame.L == 0:
        raise InfeasibleCriterionError(
            "relative criterion cannot be met when M = 0 is possible: coverage is 0 for every n",
            details={"witness_M": 0},
        )
    if frame.N < 2:
        raise UnreachableSampleSizeError(
            "sample sizes start at 2, so a population of fewer than 2 units has no admissible n",
            details={"N": frame.N},
        )
    reason = describe_fallback(frame, crit)
    if reason is not None:
        logger.warning(
            "Mixed breakpoint is not inside the frame, using a substitute candidate set",
            extra={"event": "mixed_breakpoint_fallback", "reason": reason},
        )


def _search(req: SizingRequest, **options: Any) -> Tuple[SampleSizeResult, List[TraceRecord]]:
    try:
        _check_request(req)
        search = _Search(req, options)
        if req.search_mode is SearchMode.ACCELERATED:
            n_min = search.accelerated()
        else:
            n_min = search.ascending()
        if n_min is None:
            raise UnreachableSampleSizeError(
                "no sample size up to N meets the requirement",
                details={"N": req.frame.N, "delta": str(req.delta)},
            )
    except (InfeasibleCriterionError, UnreachableSampleSizeError) as e:
        logger.error(
            "Sample size search failed",
            extra={
                "event": "sizing_failed",
                "error_type": type(e).__name__,
                "error_message": str(e),
            },
            exc_info=True,
        )
        raise

    best = search.cache[n_min]
    result = SampleSizeResult(
        n_min=n_min,
        worst_M=best.worst_M,
        min_coverage=best.value,
        coverage_evaluations=sum(fm.evaluations for fm in search.cache.values()),
        candidates_at_n_min=best.candidates,
    )
    logger.info(
        "Sample size search completed",
        extra={
            "event": "sizing_complete",
            "search_mode": req.search_mode.value,
            "n_min": n_min,
            "worst_M": best.worst_M,
            "sizes_evaluated": len(search.cache),
            "coverage_evaluations": result.coverage_evaluations,
        },
    )
    return result, search.trace


def minimum_sample_size(req: SizingRequest, **options: Any) -> SampleSizeResult:
    """
    Smallest n in [2, N] whose minimum coverage over the frame exceeds 1 - delta.

    Keyword options are passed to min_coverage_over_frame (symmetry, threads,
    fast_path, guard).

    Raises:
        InfeasibleCriterionError: Relative criterion on a frame with L = 0
        UnreachableSampleSizeError: No n in [2, N] meets the requirement
    """
    return _search(req, **options)[0]


def sizing_trace(req: SizingRequest, **options: Any) -> List[TraceRecord]:
    """One record per evaluated n, in evaluation order; the last record is the answer."""
    return _search(req, **options)[1]


def search_with_trace(
    req: SizingRequest, **options: Any
) -> Tuple[SampleSizeResult, List[TraceRecord]]:
    """Result and trace from a single search."""
    return _search(req, **options)


__all__ = [
    "FrameMinimum",
    "SampleSizeResult",
    "SearchMode",
    "SizingRequest",
    "TraceRecord",
    "min_coverage_over_frame",
    "minimum_sample_size",
    "search_with_trace",
    "sizing_trace",
]
