"""
Seeded simulation of sampling without replacement.

Trials are drawn in fixed-size blocks; block b uses a Philox generator keyed by the
seed with its counter starting at b << 64. A trial's random draws therefore depend
only on (seed, trial index), not on how many trials are requested or on threads.
"""

import math
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.engine.combinatorics import check_hyper_params
from src.engine.coverage import ErrorCriterion, event_holds

# uniform draws per block
_BLOCK_DRAWS = 2**20


class MonteCarloEstimate(BaseModel):
    """
    Share of simulated samples meeting the criterion.

    The estimate and its sampling variance are exact fractions; stderr is the float
    square root of the variance, for display.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    hits: int
    trials: int
    estimate: Fraction
    variance: Fraction

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance)

    def within(self, exact: Fraction, sigmas: float = 4.0) -> bool:
        """Exact check that |estimate - exact| <= sigmas * stderr."""
        gap = self.estimate - Fraction(exact)
        return gap * gap <= Fraction(sigmas) ** 2 * self.variance


def block_generator(seed: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 64))


def sample_counts(n: int, M: int, N: int, rows: int, rng: np.random.Generator) -> np.ndarray:
    """Attribute counts of `rows` uniform size-n subsets of units 0..N-1; units below M carry it."""
    if n == N:
        return np.full(rows, M, dtype=np.int64)
    keys = rng.random((rows, N))
    chosen = np.argpartition(keys, n - 1, axis=1)[:, :n]
    return (chosen < M).sum(axis=1)


def monte_carlo_coverage(
    n: int, M: int, N: int, crit: ErrorCriterion, trials: int, seed: int
) -> MonteCarloEstimate:
    """
    Estimate coverage by simulating `trials` samples of size n drawn without replacement.

    Args:
        n: Sample size, 1 <= n <= N
        M: Attribute count, 0 <= M <= N
        N: Population size
        crit: Error criterion
        trials: Number of simulated samples, at least 1
        seed: Non-negative generator key

    Returns:
        MonteCarloEstimate with the exact hit fraction and an exact variance from the
        adjusted proportion (hits + 2) / (trials + 4)
    """
    check_hyper_params(n, M, N)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    accepted = np.array([event_holds(k, n, M, N, crit) for k in range(n + 1)])
    rows = max(1, _BLOCK_DRAWS // N)
    hits, done, block = 0, 0, 0
    while done < trials:
        take = min(rows, trials - done)
        counts = sample_counts(n, M, N, rows, block_generator(seed, block))[:take]
        hits += int(accepted[counts].sum())
        done += take
        block += 1

    adjusted = Fraction(hits + 2, trials + 4)
    return MonteCarloEstimate(
        hits=hits,
        trials=trials,
        estimate=Fraction(hits, trials),
        variance=adjusted * (1 - adjusted) / trials,
    )
