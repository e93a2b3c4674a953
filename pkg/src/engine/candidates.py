"""
Candidate sets of M values where the minimum coverage over a frame is attained.

Each set holds the frame endpoints plus the points where the acceptance window
changes: the last M before the upper edge h(M) steps up (floor family) and the
first M after the lower edge g(M) steps up (ceiling family). Family members are
enumerated from exact k ranges, never by scanning M, so construction costs
O(|set|) regardless of N.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from src.engine.coverage import (
    CriterionKind,
    ErrorCriterion,
    PopulationFrame,
    mixed_breakpoint,
    to_exact,
)
from src.engine.errors import CandidatePreconditionError


class Provenance(str, Enum):
    ENDPOINT = "endpoint"
    BREAKPOINT = "breakpoint"
    FLOOR_FAMILY = "floor_family"
    CEILING_FAMILY = "ceiling_family"


_PRECEDENCE = {
    Provenance.ENDPOINT: 0,
    Provenance.BREAKPOINT: 1,
    Provenance.FLOOR_FAMILY: 2,
    Provenance.CEILING_FAMILY: 3,
}


class CandidateRule(str, Enum):
    """Which construction produced a set."""

    ABSOLUTE = "absolute"
    RELATIVE = "relative"
    MIXED = "mixed"
    MIXED_SPLIT = "mixed_split"
    ABSOLUTE_FALLBACK = "absolute_fallback"
    RELATIVE_FALLBACK = "relative_fallback"


_FALLBACK_RULES = {
    CandidateRule.MIXED_SPLIT,
    CandidateRule.ABSOLUTE_FALLBACK,
    CandidateRule.RELATIVE_FALLBACK,
}


class CandidateSet(BaseModel):
    """Sorted candidate members with provenance tags and the size bound for the instance."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frame: PopulationFrame
    n: int
    members: Tuple[int, ...]
    provenance: Tuple[Provenance, ...]
    bound: Fraction
    rule: CandidateRule

    @model_validator(mode="after")
    def _check_members(self) -> "CandidateSet":
        if len(self.members) != len(self.provenance):
            raise ValueError("every member needs exactly one provenance tag")
        if any(a >= b for a, b in zip(self.members, self.members[1:])):
            raise ValueError("members must be strictly increasing")
        if self.members[0] != self.frame.L or self.members[-1] != self.frame.U:
            raise ValueError("frame endpoints must be members")
        return self

    @property
    def fallback(self) -> bool:
        return self.rule in _FALLBACK_RULES

    def tagged(self) -> List[Tuple[int, Provenance]]:
        return list(zip(self.members, self.provenance))


class _MemberCollector:
    def __init__(self) -> None:
        self._tags: Dict[int, Provenance] = {}

    def add(self, value: int, tag: Provenance) -> None:
        current = self._tags.get(value)
        if current is None or _PRECEDENCE[tag] < _PRECEDENCE[current]:
            self._tags[value] = tag

    def extend(self, items: Iterator[Tuple[int, Provenance]]) -> None:
        for value, tag in items:
            self.add(value, tag)

    def build(
        self, frame: PopulationFrame, n: int, bound: Fraction, rule: CandidateRule
    ) -> CandidateSet:
        members = tuple(sorted(self._tags))
        return CandidateSet(
            frame=frame,
            n=n,
            members=members,
            provenance=tuple(self._tags[m] for m in members),
            bound=bound,
            rule=rule,
        )


def _check_sample(frame: PopulationFrame, n: int) -> None:
    if not 1 <= n <= frame.N:
        raise ValueError(f"sample size n must lie in [1, {frame.N}], got {n}")


def _radius(value: Any) -> Fraction:
    radius = to_exact(value)
    if not 0 < radius < 1:
        raise ValueError(f"error radius must lie strictly in (0, 1), got {radius}")
    return radius


def _pure_bound(frame: PopulationFrame, n: int) -> Fraction:
    return Fraction(2 * n * (frame.U - frame.L - 1), frame.N) + 4


def _mixed_bound(frame: PopulationFrame, n: int) -> Fraction:
    return Fraction(2 * n * (frame.U - frame.L - 3), frame.N) + 8


def _absolute_families(
    L: int, U: int, N: int, n: int, eps: Fraction
) -> Iterator[Tuple[int, Provenance]]:
    """Floor and ceiling family members strictly inside (L, U) for the absolute window."""
    if U - L < 2:
        return
    # floor(N(k/n - eps)) in (L, U)  <=>  n((L+1)/N + eps) <= k < n(U/N + eps)
    for k in range(
        math.ceil(n * (Fraction(L + 1, N) + eps)),
        math.ceil(n * (Fraction(U, N) + eps)),
    ):
        yield math.floor(N * (Fraction(k, n) - eps)), Provenance.FLOOR_FAMILY
    # ceil(N(k/n + eps)) in (L, U)  <=>  n(L/N - eps) < k <= n((U-1)/N - eps)
    for k in range(
        math.floor(n * (Fraction(L, N) - eps)) + 1,
        math.floor(n * (Fraction(U - 1, N) - eps)) + 1,
    ):
        yield math.ceil(N * (Fraction(k, n) + eps)), Provenance.CEILING_FAMILY


def _relative_families(
    L: int, U: int, N: int, n: int, eps: Fraction
) -> Iterator[Tuple[int, Provenance]]:
    """Floor and ceiling family members strictly inside (L, U) for the relative window."""
    if U - L < 2:
        return
    rise = (1 + eps) * n / N
    fall = (1 - eps) * n / N
    # floor(Nk / ((1+eps)n)) in (L, U)  <=>  (L+1) rise <= k < U rise
    for k in range(math.ceil((L + 1) * rise), math.ceil(U * rise)):
        yield math.floor(N * k / ((1 + eps) * n)), Provenance.FLOOR_FAMILY
    # ceil(Nk / ((1-eps)n)) in (L, U)  <=>  L fall < k <= (U-1) fall
    for k in range(math.floor(L * fall) + 1, math.floor((U - 1) * fall) + 1):
        yield math.ceil(N * k / ((1 - eps) * n)), Provenance.CEILING_FAMILY


def _endpoints(frame: PopulationFrame) -> _MemberCollector:
    collector = _MemberCollector()
    collector.add(frame.L, Provenance.ENDPOINT)
    collector.add(frame.U, Provenance.ENDPOINT)
    return collector


def candidate_set_absolute(frame: PopulationFrame, n: int, eps: Any) -> CandidateSet:
    """
    Candidate set for the absolute criterion |k/n - M/N| < eps.

    Args:
        frame: Population size and knowledge interval [L, U]
        n: Sample size, 1 <= n <= N
        eps: Error radius in (0, 1)

    Returns:
        {L, U} plus both window-change families inside (L, U)
    """
    _check_sample(frame, n)
    radius = _radius(eps)
    collector = _endpoints(frame)
    collector.extend(_absolute_families(frame.L, frame.U, frame.N, n, radius))
    return collector.build(frame, n, _pure_bound(frame, n), CandidateRule.ABSOLUTE)


def candidate_set_relative(frame: PopulationFrame, n: int, eps: Any) -> CandidateSet:
    """
    Candidate set for the relative criterion |k/n - M/N| < eps M/N.

    Args:
        frame: Population size and knowledge interval [L, U]
        n: Sample size, 1 <= n <= N
        eps: Error radius in (0, 1)

    Returns:
        {L, U} plus both window-change families inside (L, U)
    """
    _check_sample(frame, n)
    radius = _radius(eps)
    collector = _endpoints(frame)
    collector.extend(_relative_families(frame.L, frame.U, frame.N, n, radius))
    return collector.build(frame, n, _pure_bound(frame, n), CandidateRule.RELATIVE)


def candidate_set_mixed(frame: PopulationFrame, n: int, eps_a: Any, eps_r: Any) -> CandidateSet:
    """
    Candidate set for the mixed criterion, absolute below the breakpoint and relative above.

    Requires L < N eps_a / eps_r < U.

    Raises:
        CandidatePreconditionError: If the breakpoint is not strictly inside the frame
    """
    _check_sample(frame, n)
    crit = ErrorCriterion.mixed(eps_a, eps_r)
    split = mixed_breakpoint(frame.N, crit)
    if not frame.L < split < frame.U:
        raise CandidatePreconditionError(
            "mixed breakpoint N*eps_a/eps_r must lie strictly inside (L, U)",
            details={
                "breakpoint": f"{split.numerator}/{split.denominator}",
                "L": frame.L,
                "U": frame.U,
            },
        )
    B = math.floor(split)
    eps_a_exact, eps_r_exact = Fraction(crit.eps_a), Fraction(crit.eps_r)
    collector = _endpoints(frame)
    collector.add(B, Provenance.BREAKPOINT)
    collector.add(B + 1, Provenance.BREAKPOINT)
    collector.extend(_absolute_families(frame.L, B, frame.N, n, eps_a_exact))
    collector.extend(_relative_families(B + 1, frame.U, frame.N, n, eps_r_exact))
    return collector.build(frame, n, _mixed_bound(frame, n), CandidateRule.MIXED)


def candidate_set_for(frame: PopulationFrame, n: int, crit: ErrorCriterion) -> CandidateSet:
    """
    Candidate set for any criterion, substituting a pure set when a mixed breakpoint is degenerate.

    Mixed criteria whose breakpoint lies below L are relative on the whole frame, and those
    whose breakpoint floor reaches U are absolute on the whole frame. A breakpoint exactly
    at L leaves M = L on the absolute side, so the frame is split there.
    """
    if crit.kind is CriterionKind.ABSOLUTE:
        return candidate_set_absolute(frame, n, crit.eps)
    if crit.kind is CriterionKind.RELATIVE:
        return candidate_set_relative(frame, n, crit.eps)

    split = mixed_breakpoint(frame.N, crit)
    if frame.L < split < frame.U:
        return candidate_set_mixed(frame, n, crit.eps_a, crit.eps_r)
    if split < frame.L:
        pure = candidate_set_relative(frame, n, crit.eps_r)
        return pure.model_copy(update={"rule": CandidateRule.RELATIVE_FALLBACK})
    if math.floor(split) >= frame.U:
        pure = candidate_set_absolute(frame, n, crit.eps_a)
        return pure.model_copy(update={"rule": CandidateRule.ABSOLUTE_FALLBACK})

    # split == L: only M = L is judged by the absolute window
    _check_sample(frame, n)
    collector = _endpoints(frame)
    collector.add(frame.L + 1, Provenance.BREAKPOINT)
    collector.extend(
        _relative_families(frame.L + 1, frame.U, frame.N, n, Fraction(crit.eps_r))  # type: ignore
    )
    return collector.build(frame, n, _mixed_bound(frame, n), CandidateRule.MIXED_SPLIT)


def reflect_frame(frame: PopulationFrame) -> PopulationFrame:
    """Mirror [L, U] to [N - U, N - L]; absolute coverage is symmetric under M -> N - M."""
    return PopulationFrame(N=frame.N, L=frame.N - frame.U, U=frame.N - frame.L)


def fold_frame(frame: PopulationFrame) -> Optional[PopulationFrame]:
    """
    Fold a frame that straddles the middle onto [min(L, N - U), ceil(N/2)].

    Returns None when folding would not shrink the frame. Every M of the folded frame
    lies in the original frame or has its mirror image there.
    """
    half = (frame.N + 1) // 2
    if frame.U <= half or frame.L >= frame.N // 2:
        return None
    return PopulationFrame(N=frame.N, L=min(frame.L, frame.N - frame.U), U=half)


def evaluation_bound(n: int) -> int:
    """Most coverage evaluations needed per n on [0, ceil(N/2)] under the absolute criterion."""
    return n + 2


def describe_fallback(frame: PopulationFrame, crit: ErrorCriterion) -> Optional[str]:
    """Why a mixed criterion falls back to a substitute set, or None if no fallback is needed."""
    if crit.kind is not CriterionKind.MIXED:
        return None
    split = mixed_breakpoint(frame.N, crit)
    if frame.L < split < frame.U:
        return None
    if split < frame.L:
        return "breakpoint below L: relative criterion on the whole frame"
    if math.floor(split) >= frame.U:
        return "breakpoint at or above U: absolute criterion on the whole frame"
    return "breakpoint equals L: absolute at M = L, relative on [L+1, U]"


__all__ = [
    "CandidateRule",
    "CandidateSet",
    "Provenance",
    "candidate_set_absolute",
    "candidate_set_for",
    "candidate_set_mixed",
    "candidate_set_relative",
    "describe_fallback",
    "evaluation_bound",
    "fold_frame",
    "reflect_frame",
]
