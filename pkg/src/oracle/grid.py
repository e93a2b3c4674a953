"""Canonical instance grids for the verification sweeps."""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.engine.coverage import ErrorCriterion, PopulationFrame, to_exact

DEFAULT_EPS = (Fraction(1, 20), Fraction(1, 10), Fraction(1, 4), Fraction(9, 20))


class NPolicy(str, Enum):
    ALL = "all"
    DIVISORS = "divisors"
    LIST = "list"


class FramePolicy(str, Enum):
    FULL = "full"
    HALVES = "halves"
    RANDOM = "random"


class Instance(BaseModel):
    """One (N, n, frame, criterion) point of a sweep."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    frame: PopulationFrame
    criterion: ErrorCriterion

    @property
    def key(self) -> Tuple[Any, ...]:
        c = self.criterion
        radii = tuple(r for r in (c.eps, c.eps_a, c.eps_r) if r is not None)
        return (self.frame.N, self.n, self.frame.L, self.frame.U, c.kind.value, radii)

    def describe(self) -> Dict[str, Any]:
        return {
            "N": self.frame.N,
            "n": self.n,
            "L": self.frame.L,
            "U": self.frame.U,
            **self.criterion.describe(),
        }


class GridSpec(BaseModel):
    """
    Population sizes, sample-size policy, radii and frame policies of a sweep.

    Random frames are drawn from a generator seeded with (seed, N), so the frames
    for one N do not depend on which other N values are in the grid.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N_min: int = 2
    N_max: int = 60
    n_policy: NPolicy = NPolicy.ALL
    n_list: Tuple[int, ...] = ()
    eps_list: Tuple[Fraction, ...] = DEFAULT_EPS
    frame_policies: Tuple[FramePolicy, ...] = (
        FramePolicy.FULL,
        FramePolicy.HALVES,
        FramePolicy.RANDOM,
    )
    random_frames: int = 5
    seed: int = 7

    @field_validator("eps_list", mode="before")
    @classmethod
    def _exact_eps(cls, value: Any) -> Tuple[Fraction, ...]:
        radii = tuple(to_exact(v) for v in value)
        for radius in radii:
            if not 0 < radius < 1:
                raise ValueError(f"grid radius must lie strictly in (0, 1), got {radius}")
        return radii

    @model_validator(mode="after")
    def _check_range(self) -> "GridSpec":
        if not 2 <= self.N_min <= self.N_max:
            raise ValueError(f"grid needs 2 <= N_min <= N_max, got [{self.N_min}, {self.N_max}]")
        if self.random_frames < 0 or self.seed < 0:
            raise ValueError("random_frames and seed must be non-negative")
        return self

    @property
    def populations(self) -> List[int]:
        return list(range(self.N_min, self.N_max + 1))

    def sample_sizes(self, N: int) -> List[int]:
        if self.n_policy is NPolicy.DIVISORS:
            return [n for n in range(2, N + 1) if N % n == 0]
        if self.n_policy is NPolicy.LIST:
            return sorted({n for n in self.n_list if 2 <= n <= N})
        return list(range(2, N + 1))

    def frames(self, N: int) -> List[PopulationFrame]:
        seen: Dict[Tuple[int, int], None] = {}
        for policy in self.frame_policies:
            if policy is FramePolicy.FULL:
                seen.setdefault((0, N), None)
            elif policy is FramePolicy.HALVES:
                seen.setdefault((0, (N + 1) // 2), None)
            else:
                rng = np.random.default_rng([self.seed, N])
                for _ in range(self.random_frames):
                    a, b = sorted(int(x) for x in rng.integers(0, N + 1, size=2))
                    seen.setdefault((a, b), None)
        return [PopulationFrame(N=N, L=L, U=U) for L, U in seen]

    def instances(self, N: int, criteria: List[ErrorCriterion]) -> Iterator[Instance]:
        """Instances for one population size in canonical order."""
        for n in self.sample_sizes(N):
            for frame in self.frames(N):
                for crit in criteria:
                    yield Instance(n=n, frame=frame, criterion=crit)


def absolute_criteria(spec: GridSpec) -> List[ErrorCriterion]:
    return [ErrorCriterion.absolute(eps) for eps in spec.eps_list]


def relative_criteria(spec: GridSpec) -> List[ErrorCriterion]:
    return [ErrorCriterion.relative(eps) for eps in spec.eps_list]


def relative_frame(frame: PopulationFrame) -> PopulationFrame:
    """Lift L to 1 so the relative criterion is feasible; frames with U = 0 cannot be lifted."""
    return PopulationFrame(N=frame.N, L=max(frame.L, 1), U=frame.U)


def mixed_criteria(frame: PopulationFrame) -> List[ErrorCriterion]:
    """
    Mixed radii whose breakpoint N eps_a / eps_r lands inside the frame, next to its ends,
    exactly on them, and far outside on both sides.
    """
    N, eps_r = frame.N, Fraction(1, 4)
    pairs = [
        (Fraction(1, 20), Fraction(1, 4)),
        (Fraction(1, 10), Fraction(1, 5)),
        (Fraction(1, 4), Fraction(1, 10)),
        (Fraction(1, 100), Fraction(9, 20)),
    ]
    for target in (frame.L, frame.L + 1, frame.U - 1, frame.U):
        if 1 <= target <= N:
            pairs.append((Fraction(target, 4 * N), eps_r))
    unique = list(dict.fromkeys(pairs))
    return [ErrorCriterion.mixed(a, r) for a, r in unique]
