"""
Error criteria and exact coverage probabilities.

Every criterion reduces, for a given (n, M, N), to an integer window [g, h] of
accepted sample counts k. The criteria use strict inequalities, so a count whose
error equals the radius exactly is rejected.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.engine.combinatorics import (
    binom,
    check_hyper_params,
    window_count,
    window_probability,
)


class CriterionKind(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"
    MIXED = "mixed"


def to_exact(value: Any) -> Fraction:
    """Convert an int, Fraction or rational string to a Fraction; floats are rejected."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"expected an exact rational, got {value!r}")
    if isinstance(value, (int, Fraction, str)):
        return Fraction(value)
    raise ValueError(f"expected an exact rational, got {type(value).__name__}")


class ErrorCriterion(BaseModel):
    """Absolute, relative or mixed error requirement with radii strictly inside (0, 1)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: CriterionKind
    eps: Optional[Fraction] = None
    eps_a: Optional[Fraction] = None
    eps_r: Optional[Fraction] = None

    @field_validator("eps", "eps_a", "eps_r", mode="before")
    @classmethod
    def _exact_radius(cls, value: Any) -> Optional[Fraction]:
        if value is None:
            return None
        radius = to_exact(value)
        if not 0 < radius < 1:
            raise ValueError(f"error radius must lie strictly in (0, 1), got {radius}")
        return radius

    @model_validator(mode="after")
    def _check_radii(self) -> "ErrorCriterion":
        if self.kind is CriterionKind.MIXED:
            if self.eps_a is None or self.eps_r is None:
                raise ValueError("mixed criterion needs both eps_a and eps_r")
        elif self.eps is None:
            raise ValueError(f"{self.kind.value} criterion needs eps")
        return self

    @classmethod
    def absolute(cls, eps: Any) -> "ErrorCriterion":
        return cls(kind=CriterionKind.ABSOLUTE, eps=eps)

    @classmethod
    def relative(cls, eps: Any) -> "ErrorCriterion":
        return cls(kind=CriterionKind.RELATIVE, eps=eps)

    @classmethod
    def mixed(cls, eps_a: Any, eps_r: Any) -> "ErrorCriterion":
        return cls(kind=CriterionKind.MIXED, eps_a=eps_a, eps_r=eps_r)

    def describe(self) -> dict:
        """Radii as p/q strings keyed by name."""
        if self.kind is CriterionKind.MIXED:
            return {"kind": self.kind.value, "eps_a": _pq(self.eps_a), "eps_r": _pq(self.eps_r)}
        return {"kind": self.kind.value, "eps": _pq(self.eps)}


def _pq(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else f"{value.numerator}/{value.denominator}"


class AcceptanceWindow(BaseModel):
    """Accepted sample counts g <= k <= h; empty when g > h."""

    model_config = ConfigDict(frozen=True)

    g: int
    h: int

    @property
    def empty(self) -> bool:
        return self.g > self.h


class PopulationFrame(BaseModel):
    """Population size N and the knowledge interval [L, U] for M."""

    model_config = ConfigDict(frozen=True)

    N: int
    L: int
    U: int

    @model_validator(mode="after")
    def _check_bounds(self) -> "PopulationFrame":
        if self.N < 1:
            raise ValueError(f"population size N must be >= 1, got {self.N}")
        if not 0 <= self.L <= self.U <= self.N:
            raise ValueError(f"frame must satisfy 0 <= L <= U <= N, got [{self.L}, {self.U}]")
        return self

    @classmethod
    def full(cls, N: int) -> "PopulationFrame":
        return cls(N=N, L=0, U=N)

    @property
    def width(self) -> int:
        return self.U - self.L + 1


def mixed_breakpoint(N: int, crit: ErrorCriterion) -> Fraction:
    """Exact N * eps_a / eps_r where a mixed criterion switches from absolute to relative."""
    if crit.kind is not CriterionKind.MIXED:
        raise ValueError("breakpoint is defined for the mixed criterion only")
    return N * crit.eps_a / crit.eps_r  # type: ignore[operator]


def _open_interval_bounds(lower: Fraction, upper: Fraction) -> Tuple[int, int]:
    """Integers k with lower < k < upper, as (g, h)."""
    return math.floor(lower) + 1, math.ceil(upper) - 1


def _window_bounds(n: int, M: int, N: int, crit: ErrorCriterion) -> Tuple[int, int]:
    share = Fraction(n * M, N)
    if crit.kind is CriterionKind.MIXED:
        if M <= math.floor(mixed_breakpoint(N, crit)):
            return _open_interval_bounds(share - n * crit.eps_a, share + n * crit.eps_a)
        return _open_interval_bounds(share * (1 - crit.eps_r), share * (1 + crit.eps_r))
    if crit.kind is CriterionKind.ABSOLUTE:
        return _open_interval_bounds(share - n * crit.eps, share + n * crit.eps)
    return _open_interval_bounds(share * (1 - crit.eps), share * (1 + crit.eps))


def acceptance_window(n: int, M: int, N: int, crit: ErrorCriterion) -> AcceptanceWindow:
    """
    Integer window of sample counts k accepted by the criterion.

    Args:
        n: Sample size, 1 <= n <= N
        M: Attribute count, 0 <= M <= N
        N: Population size
        crit: Error criterion

    Returns:
        AcceptanceWindow with g = lowest and h = highest accepted k
    """
    check_hyper_params(n, M, N)
    g, h = _window_bounds(n, M, N, crit)
    return AcceptanceWindow(g=g, h=h)


def coverage(n: int, M: int, N: int, crit: ErrorCriterion) -> Fraction:
    """Exact probability that a size-n sample meets the criterion when the population has M."""
    check_hyper_params(n, M, N)
    g, h = _window_bounds(n, M, N, crit)
    return window_probability(n, g, h, M, N)


def event_holds(k: int, n: int, M: int, N: int, crit: ErrorCriterion) -> bool:
    """Evaluate the criterion's strict inequality for one observed count k."""
    error = abs(Fraction(k, n) - Fraction(M, N))
    share = Fraction(M, N)
    if crit.kind is CriterionKind.ABSOLUTE:
        return error < crit.eps
    if crit.kind is CriterionKind.RELATIVE:
        return error < crit.eps * share  # type: ignore[operator]
    return error < crit.eps_a or error < crit.eps_r * share  # type: ignore[operator]


def event_coverage(n: int, M: int, N: int, crit: ErrorCriterion) -> Fraction:
    """Coverage summed count by count over every k satisfying the event, without windows."""
    check_hyper_params(n, M, N)
    accepted = sum(
        window_count(n, k, k, M, N) for k in range(0, n + 1) if event_holds(k, n, M, N, crit)
    )
    return Fraction(accepted, binom(N, n))


def mixed_piecewise_check(n: int, M: int, N: int, eps_a: Any, eps_r: Any) -> bool:
    """
    Check that mixed coverage equals the coverage of the pure criterion selected at M.

    The union event reduces to the absolute event with eps_a for M <= floor(N eps_a / eps_r)
    and to the relative event with eps_r above it.
    """
    mixed = ErrorCriterion.mixed(eps_a, eps_r)
    if M <= math.floor(mixed_breakpoint(N, mixed)):
        selected = ErrorCriterion.absolute(eps_a)
    else:
        selected = ErrorCriterion.relative(eps_r)
    return event_coverage(n, M, N, mixed) == coverage(n, M, N, selected)


__all__ = [
    "AcceptanceWindow",
    "CriterionKind",
    "ErrorCriterion",
    "PopulationFrame",
    "acceptance_window",
    "mixed_breakpoint",
    "coverage",
    "event_coverage",
    "event_holds",
    "mixed_piecewise_check",
    "to_exact",
]
