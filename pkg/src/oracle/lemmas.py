"""
Exhaustive checks of the combinatorial identities and inequalities behind the candidate sets.

Probabilities over one (N, n) share the denominator C(N, n), so every identity is
checked on integer numerators from window_count and kernel_count.
"""

import math
import time
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from src.config import config
from src.engine.combinatorics import kernel_count, window_count
from src.oracle.report import Tally, VerificationReport, build_report
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

SUITES = (
    "tail_difference",
    "tail_monotonicity",
    "window_difference",
    "floor_threshold",
    "kernel_monotonicity",
    "endpoint_minimum",
    "unimodality",
    "ceiling_steps",
    "floor_steps",
    "window_growth",
    "window_shift",
)


def lemma_eps_grid(N: int, n: int) -> List[Fraction]:
    """Radii that include values putting N(k/n +- eps) exactly on integers."""
    grid = {
        Fraction(1, 20),
        Fraction(1, 10),
        Fraction(1, 8),
        Fraction(1, 4),
        Fraction(9, 20),
        Fraction(1, 2) - Fraction(1, 1000),
        Fraction(1, N),
        Fraction(2, N),
        Fraction(1, n) - Fraction(1, N),
        Fraction(1, n) + Fraction(1, N),
    }
    return sorted(eps for eps in grid if 0 < eps < 1)


class _Windows:
    """Window counts for one (N, n) keyed by (k, l), each a list over M in [0, N]."""

    def __init__(self, N: int, n: int):
        self.N, self.n = N, n
        self._rows: Dict[Tuple[int, int], List[int]] = {}

    def __call__(self, k: int, l: int, M: int) -> int:
        row = self._rows.get((k, l))
        if row is None:
            row = [window_count(self.n, k, l, m, self.N) for m in range(self.N + 1)]
            self._rows[(k, l)] = row
        return row[M]

    def row(self, k: int, l: int) -> List[int]:
        self(k, l, 0)
        return self._rows[(k, l)]


def _kernel(k: int, M: int, N: int, n: int) -> int:
    return kernel_count(k, M, N, n)


def _check_tail_difference(t: Tally, W: _Windows, N: int, n: int) -> None:
    for M in range(N):
        for k in range(-1, n + 2):
            lhs = W(0, k, M) - W(0, k, M + 1)
            rhs = _kernel(k, M, N, n)
            t.check(lhs == rhs, {"N": N, "n": n, "M": M, "k": k}, rhs, lhs)


def _check_tail_monotonicity(t: Tally, W: _Windows, N: int, n: int) -> None:
    for k in (-1, 0):
        for l in range(0, n):
            row = W.row(k, l)
            falls = all(b <= a for a, b in zip(row, row[1:]))
            t.check(falls, {"N": N, "n": n, "k": k, "l": l, "part": "lower"})
    for k in range(1, n + 1):
        for l in (n, n + 1):
            row = W.row(k, l)
            rises = all(b >= a for a, b in zip(row, row[1:]))
            t.check(rises, {"N": N, "n": n, "k": k, "l": l, "part": "upper"})


def _check_window_difference(t: Tally, W: _Windows, N: int, n: int) -> None:
    for M in range(1, N + 1):
        for k in range(-1, n + 2):
            for l in range(k, n + 2):
                lhs = W(k, l, M) - W(k, l, M - 1)
                rhs = _kernel(k - 1, M - 1, N, n) - _kernel(l, M - 1, N, n)
                t.check(lhs == rhs, {"N": N, "n": n, "M": M, "k": k, "l": l}, rhs, lhs)


def _check_floor_threshold(t: Tally, N: int, n: int) -> None:
    if n < 2:
        return
    for M in range(N + 1):
        cut = n * M // (N + 1)
        for l in range(0, n + 1):
            if M >= 1 + N * l // (n - 1):
                t.check(cut >= l, {"N": N, "n": n, "M": M, "l": l, "part": "upper"}, l, cut)
        for k in range(0, n):
            if M <= 1 + N * (k - 1) // (n - 1):
                where = {"N": N, "n": n, "M": M, "k": k, "part": "lower"}
                t.check(cut <= k - 1, where, k - 1, cut)


def _check_kernel_monotonicity(t: Tally, N: int, n: int) -> None:
    for M in range(1, N + 1):
        cut = n * M // (N + 1)
        for r in range(0, n + 1):
            where = {"N": N, "n": n, "M": M, "r": r}
            here = _kernel(r, M - 1, N, n)
            if 1 <= r <= cut:
                t.check(_kernel(r - 1, M - 1, N, n) <= here, {**where, "part": "rising_r"})
            if cut <= r <= n - 1:
                t.check(_kernel(r + 1, M - 1, N, n) <= here, {**where, "part": "falling_r"})
    if n < 2:
        return
    for r in range(0, n + 1):
        c = 1 + N * r // (n - 1)
        for M in range(2, min(c, N) + 1):
            where = {"N": N, "n": n, "M": M, "r": r, "part": "rising_M"}
            t.check(_kernel(r, M - 2, N, n) <= _kernel(r, M - 1, N, n), where)
        for M in range(max(c, 1), N):
            where = {"N": N, "n": n, "M": M, "r": r, "part": "falling_M"}
            t.check(_kernel(r, M, N, n) <= _kernel(r, M - 1, N, n), where)


def _check_endpoint_minimum(t: Tally, u: Tally, W: _Windows, N: int, n: int) -> None:
    for k in range(-1, n + 2):
        for l in range(k, n + 2):
            row = W.row(k, l)
            ok = _endpoint_minima_hold(row)
            t.check(ok, {"N": N, "n": n, "k": k, "l": l})
            if 0 < k <= l < n:
                u.check(_unimodal(row), {"N": N, "n": n, "k": k, "l": l})


def _endpoint_minima_hold(row: List[int]) -> bool:
    """min over every [L, U] of the row equals min(row[L], row[U])."""
    for L in range(len(row)):
        running = row[L]
        for U in range(L, len(row)):
            running = min(running, row[U])
            if running != min(row[L], row[U]):
                return False
    return True


def _unimodal(row: List[int]) -> bool:
    """Non-decreasing, then non-increasing."""
    descending = False
    for a, b in zip(row, row[1:]):
        if b < a:
            descending = True
        elif b > a and descending:
            return False
    return True


def _check_steps(ceil_t: Tally, floor_t: Tally, N: int, n: int) -> None:
    for eps in lemma_eps_grid(N, n):
        for k in range(-1, n + 2):
            where = {"N": N, "n": n, "k": k, "eps": f"{eps.numerator}/{eps.denominator}"}
            r = math.floor(N * (Fraction(k, n) - eps))
            r_next = math.floor(N * (Fraction(k + 1, n) - eps))
            for m in range(r, r_next + 1):
                want = k if m == r else k + 1
                got = math.ceil(n * (Fraction(m, N) + eps))
                ceil_t.check(got == want, {**where, "m": m}, want, got)
            s = math.ceil(N * (Fraction(k, n) + eps))
            s_next = math.ceil(N * (Fraction(k + 1, n) + eps))
            for m in range(s, s_next + 1):
                want = k + 1 if m == s_next else k
                got = math.floor(n * (Fraction(m, N) - eps))
                floor_t.check(got == want, {**where, "m": m}, want, got)


def _check_comparisons(grow: Tally, shift: Tally, W: _Windows, N: int, n: int) -> None:
    for g in range(-1, n + 2):
        for h in range(g, n + 2):
            for rho in range(N):
                diff = W(g, h + 1, rho + 1) - W(g, h, rho)
                grow.check(diff >= 0, {"N": N, "n": n, "g": g, "h": h, "M": rho}, ">= 0", diff)
            for tau in range(1, N + 1):
                diff = W(g - 1, h, tau - 1) - W(g, h, tau)
                shift.check(diff >= 0, {"N": N, "n": n, "g": g, "h": h, "M": tau}, ">= 0", diff)


def _lemmas_for_population(N: int, collect_lines: bool) -> Dict[str, Tally]:
    tallies = {name: Tally(name, collect_lines) for name in SUITES}
    for n in range(1, N + 1):
        W = _Windows(N, n)
        _check_tail_difference(tallies["tail_difference"], W, N, n)
        _check_tail_monotonicity(tallies["tail_monotonicity"], W, N, n)
        _check_window_difference(tallies["window_difference"], W, N, n)
        _check_floor_threshold(tallies["floor_threshold"], N, n)
        _check_kernel_monotonicity(tallies["kernel_monotonicity"], N, n)
        _check_endpoint_minimum(tallies["endpoint_minimum"], tallies["unimodality"], W, N, n)
        _check_steps(tallies["ceiling_steps"], tallies["floor_steps"], N, n)
        _check_comparisons(tallies["window_growth"], tallies["window_shift"], W, N, n)
    return tallies


def lemma_tallies(
    N_max: int, threads: Optional[int] = None, collect_lines: bool = False
) -> List[Tally]:
    """Run every identity check for 2 <= N <= N_max and merge per suite in N order."""
    if N_max < 2:
        raise ValueError(f"lemma suite needs N_max >= 2, got {N_max}")
    jobs = config.threads if threads is None else threads
    parts = Parallel(n_jobs=-1 if jobs == 0 else jobs, prefer="threads")(
        delayed(_lemmas_for_population)(N, collect_lines) for N in range(2, N_max + 1)
    )
    return [Tally(name, collect_lines).merge(p[name] for p in parts) for name in SUITES]


def check_lemma_suite(N_max: int, threads: Optional[int] = None) -> VerificationReport:
    """
    Exhaustively check the identities and inequalities for every N <= N_max.

    Args:
        N_max: Largest population size, at least 2
        threads: Worker threads, 0 for all cores; defaults to config

    Returns:
        VerificationReport whose failures are the violated instances
    """
    start = time.time()
    tallies = lemma_tallies(N_max, threads)
    report = build_report(tallies, tier="lemmas", seed=0, elapsed=time.time() - start)
    logger.info(
        "Lemma suite completed",
        extra={
            "event": "lemma_suite_complete",
            "N_max": N_max,
            "instances_checked": report.instances_checked,
            "failures": len(report.failures),
        },
    )
    return report
