"""
Exact combinatorial primitives for sampling without replacement.

All values are exact: binomials are Python integers and probabilities are
``fractions.Fraction`` over the common denominator C(N, n). The only floating
point code here is ``log_window_probability``, a pre-screen that never feeds a
reported value.
"""

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import special, stats

from src.config import config

ExactRatio = Fraction


class HyperParams(BaseModel):
    """Population size N, attribute count M and sample size n."""

    model_config = ConfigDict(frozen=True)

    N: int
    M: int
    n: int

    @model_validator(mode="after")
    def _check_ranges(self) -> "HyperParams":
        check_hyper_params(self.n, self.M, self.N)
        return self


def check_hyper_params(n: int, M: int, N: int) -> None:
    """Raise ValueError unless 0 <= M <= N and 1 <= n <= N."""
    if N < 1:
        raise ValueError(f"population size N must be >= 1, got {N}")
    if not 0 <= M <= N:
        raise ValueError(f"attribute count M must lie in [0, {N}], got {M}")
    if not 1 <= n <= N:
        raise ValueError(f"sample size n must lie in [1, {N}], got {n}")


@lru_cache(maxsize=config.binom_cache_size)
def _binom_canonical(m: int, z: int) -> int:
    return math.comb(m, z)


def binom(m: int, z: int) -> int:
    """
    Binomial coefficient with the zero convention outside 0 <= z <= m.

    Args:
        m: Top argument, must be non-negative
        z: Any integer

    Returns:
        m! / (z! (m - z)!) when 0 <= z <= m, else 0

    Raises:
        ValueError: If m is negative
    """
    if m < 0:
        raise ValueError(f"binomial top argument must be non-negative, got {m}")
    if z < 0 or z > m:
        return 0
    return _binom_canonical(m, min(z, m - z))


def clear_binomial_cache() -> None:
    """Drop all memoized binomials."""
    _binom_canonical.cache_clear()


def binomial_cache_info():
    """Hit/miss statistics of the binomial memo."""
    return _binom_canonical.cache_info()


def window_count(n: int, k: int, l: int, M: int, N: int) -> int:
    """
    Number of size-n samples whose attribute count lies in [k, l].

    Successive terms C(M, i) C(N - M, n - i) are produced by the ratio recurrence,
    so only the first term needs full binomials.
    """
    check_hyper_params(n, M, N)
    lo = max(k, 0, n - (N - M))
    hi = min(l, n, M)
    if lo > hi:
        return 0
    term = binom(M, lo) * binom(N - M, n - lo)
    total = term
    for i in range(lo, hi):
        # exact: the quotient is the next integer term
        term = term * (M - i) * (n - i) // ((i + 1) * (N - M - n + i + 1))
        total += term
    return total


def window_probability(n: int, k: int, l: int, M: int, N: int) -> Fraction:
    """
    Exact probability that the attribute count of a size-n sample lies in [k, l].

    Args:
        n: Sample size, 1 <= n <= N
        k: Lowest accepted count (any integer)
        l: Highest accepted count (any integer)
        M: Attribute count, 0 <= M <= N
        N: Population size

    Returns:
        Sum of C(M, i) C(N - M, n - i) / C(N, n) over k <= i <= l
    """
    return Fraction(window_count(n, k, l, M, N), binom(N, n))


def hyper_pmf(p: HyperParams, i: int) -> Fraction:
    """Exact probability of observing exactly i attribute units."""
    return Fraction(binom(p.M, i) * binom(p.N - p.M, p.n - i), binom(p.N, p.n))


def kernel_count(k: int, M: int, N: int, n: int) -> int:
    """Numerator C(M, k) C(N - M - 1, n - k - 1) of the difference kernel over C(N, n)."""
    check_hyper_params(n, M, N)
    if M >= N:
        raise ValueError(f"difference kernel needs M < N, got M={M}, N={N}")
    return binom(M, k) * binom(N - M - 1, n - k - 1)


def difference_kernel(k: int, M: int, N: int, n: int) -> Fraction:
    """
    Exact change of the lower tail [0, k] when M grows by one.

    Equals window_probability(n, 0, k, M, N) - window_probability(n, 0, k, M + 1, N).

    Raises:
        ValueError: If M is not in [0, N) or n is not in [1, N]
    """
    return Fraction(kernel_count(k, M, N, n), binom(N, n))


def log_window_probability(n: int, g: int, h: int, M: int, N: int) -> float:
    """
    Floating-point log of window_probability(n, g, h, M, N).

    Used only to pre-screen candidates; callers must re-check anything that falls
    inside their guard band exactly.
    """
    lo = max(g, 0, n - (N - M))
    hi = min(h, n, M)
    if lo > hi:
        return float("-inf")
    ks = np.arange(lo, hi + 1)
    return float(special.logsumexp(stats.hypergeom.logpmf(ks, N, M, n)))


__all__ = [
    "ExactRatio",
    "HyperParams",
    "binom",
    "binomial_cache_info",
    "check_hyper_params",
    "clear_binomial_cache",
    "difference_kernel",
    "hyper_pmf",
    "kernel_count",
    "log_window_probability",
    "window_count",
    "window_probability",
]
