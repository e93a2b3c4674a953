"""
Brute-force verification of the candidate-set engine.

Every suite compares an engine result against an independent reference: full
scans over M, event-by-event coverage sums, or simulation. Work is split by
population size; per-N results merge in ascending N, so reports do not depend
on the thread count.
"""

import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from src.config import config
from src.engine.candidates import candidate_set_for, evaluation_bound
from src.engine.coverage import (
    ErrorCriterion,
    PopulationFrame,
    coverage,
    event_coverage,
    mixed_piecewise_check,
)
from src.engine.sizing import (
    SearchMode,
    SizingRequest,
    min_coverage_over_frame,
    search_with_trace,
)
from src.oracle.grid import (
    GridSpec,
    absolute_criteria,
    mixed_criteria,
    relative_criteria,
    relative_frame,
)
from src.oracle.lemmas import lemma_tallies
from src.oracle.monte_carlo import monte_carlo_coverage
from src.oracle.report import Tally, VerificationReport, build_report
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

TIERS = ("fast", "slow")

_MIXED_PAIRS = (
    (Fraction(1, 20), Fraction(1, 4)),
    (Fraction(1, 10), Fraction(1, 5)),
    (Fraction(1, 4), Fraction(1, 10)),
    (Fraction(1, 100), Fraction(9, 20)),
)
_DELTAS = (Fraction(1, 100), Fraction(1, 20), Fraction(1, 10), Fraction(1, 5))

_TIER_SETTINGS = {
    "fast": {"grid_N": 60, "lemma_N": 20, "window_N": 30, "requests": 40, "request_N": 40},
    "slow": {"grid_N": 60, "lemma_N": 40, "window_N": 30, "requests": 200, "request_N": 80},
}

Suites = Dict[str, Tally]


def full_scan_min(n: int, frame: PopulationFrame, crit: ErrorCriterion) -> Tuple[int, Fraction]:
    """
    Minimum coverage over the frame by evaluating every M in [L, U].

    Returns:
        (worst_M, value) with the smallest M attaining the minimum
    """
    worst: Optional[Tuple[int, Fraction]] = None
    for M in range(frame.L, frame.U + 1):
        value = coverage(n, M, frame.N, crit)
        if worst is None or value < worst[1]:
            worst = (M, value)
    assert worst is not None
    return worst


def _scan(values: Sequence[Fraction], frame: PopulationFrame) -> Tuple[int, Fraction]:
    worst_M = min(range(frame.L, frame.U + 1), key=lambda M: (values[M], M))
    return worst_M, values[worst_M]


def _interlaced(values: Sequence[Fraction], members: Sequence[int]) -> bool:
    """Coverage between consecutive members never drops below the smaller end."""
    for rho, tau in zip(members, members[1:]):
        floor_value = min(values[rho], values[tau])
        if any(values[M] < floor_value for M in range(rho + 1, tau)):
            return False
    return True


def _pq(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class _Sweep:
    """Candidate/full-scan equivalence, size bound and interlacing for one criterion family."""

    def __init__(self, kind: str, spec: GridSpec, collect_lines: bool):
        self.kind = kind
        self.spec = spec
        self.collect_lines = collect_lines

    def names(self) -> List[str]:
        names = [f"{self.kind}_equivalence", f"{self.kind}_size_bound", f"{self.kind}_interlacing"]
        if self.kind == "absolute":
            names.append("evaluation_economy")
        return names

    def frames(self, N: int) -> List[PopulationFrame]:
        frames = self.spec.frames(N)
        if self.kind == "relative":
            lifted = [relative_frame(f) for f in frames if f.U >= 1]
            frames = list(dict.fromkeys(lifted))
        return frames

    def criteria(self, frame: PopulationFrame) -> List[ErrorCriterion]:
        if self.kind == "absolute":
            return absolute_criteria(self.spec)
        if self.kind == "relative":
            return relative_criteria(self.spec)
        return mixed_criteria(frame)

    def __call__(self, N: int) -> Suites:
        tallies = {name: Tally(name, self.collect_lines) for name in self.names()}
        equivalence, size_bound, interlacing = (tallies[name] for name in self.names()[:3])
        economy = tallies.get("evaluation_economy")
        for n in self.spec.sample_sizes(N):
            values: Dict[ErrorCriterion, List[Fraction]] = {}
            for frame in self.frames(N):
                for crit in self.criteria(frame):
                    if crit not in values:
                        values[crit] = [coverage(n, M, N, crit) for M in range(N + 1)]
                    row = values[crit]
                    where = {"N": N, "n": n, "L": frame.L, "U": frame.U, **crit.describe()}

                    found = min_coverage_over_frame(n, frame, crit, threads=1, fast_path=False)
                    scan_M, scan_value = _scan(row, frame)
                    agrees = (
                        found.value == scan_value
                        and frame.L <= found.worst_M <= frame.U
                        and row[found.worst_M] == found.value
                    )
                    expected = f"{scan_M}:{_pq(scan_value)}"
                    actual = f"{found.worst_M}:{_pq(found.value)}"
                    equivalence.check(agrees, where, expected, actual)
                    equivalence.candidate_evaluations += found.evaluations
                    equivalence.full_scan_evaluations += frame.width

                    members = candidate_set_for(frame, n, crit)
                    size_bound.check(
                        len(members.members) < members.bound,
                        {**where, "rule": members.rule.value},
                        f"< {_pq(members.bound)}",
                        len(members.members),
                    )
                    interlacing.check(_interlaced(row, members.members), where)

                    if economy is not None and frame.L == 0 and frame.U in (N, (N + 1) // 2):
                        bound = evaluation_bound(n)
                        economy.check(
                            found.evaluations <= bound, where, f"<= {bound}", found.evaluations
                        )
        return tallies


def _window_consistency(N: int, spec: GridSpec, collect_lines: bool) -> Suites:
    consistency = Tally("window_consistency", collect_lines)
    piecewise = Tally("mixed_piecewise", collect_lines)
    criteria = (
        absolute_criteria(spec)
        + relative_criteria(spec)
        + [ErrorCriterion.mixed(a, r) for a, r in _MIXED_PAIRS]
    )
    for n in range(1, N + 1):
        for M in range(N + 1):
            for crit in criteria:
                windowed, direct = coverage(n, M, N, crit), event_coverage(n, M, N, crit)
                where = {"N": N, "n": n, "M": M, **crit.describe()}
                consistency.check(windowed == direct, where, _pq(direct), _pq(windowed))
            for eps_a, eps_r in _MIXED_PAIRS:
                where = {"N": N, "n": n, "M": M, "eps_a": _pq(eps_a), "eps_r": _pq(eps_r)}
                piecewise.check(mixed_piecewise_check(n, M, N, eps_a, eps_r), where)
    return {"window_consistency": consistency, "mixed_piecewise": piecewise}


def sizing_requests(count: int, N_max: int, seed: int, eps_list: Sequence[Fraction]):
    """Seeded sizing requests over all three criteria; relative frames start at L >= 1."""
    rng = np.random.default_rng([seed, 1])
    requests = []
    for _ in range(count):
        N = int(rng.integers(2, N_max + 1))
        L, U = sorted(int(x) for x in rng.integers(0, N + 1, size=2))
        kind = ("absolute", "relative", "mixed")[int(rng.integers(0, 3))]
        eps = [eps_list[int(i)] for i in rng.integers(0, len(eps_list), size=2)]
        delta = _DELTAS[int(rng.integers(0, len(_DELTAS)))]
        if kind == "absolute":
            crit = ErrorCriterion.absolute(eps[0])
        elif kind == "relative":
            L, U = max(L, 1), max(U, 1)
            crit = ErrorCriterion.relative(eps[0])
        else:
            crit = ErrorCriterion.mixed(eps[0], eps[1])
        requests.append(
            SizingRequest(
                frame=PopulationFrame(N=N, L=L, U=U),
                criterion=crit,
                delta=delta,
                search_mode=SearchMode.ASCENDING,
            )
        )
    return requests


def _search_modes(requests: List[SizingRequest], collect_lines: bool) -> Suites:
    sound = Tally("search_soundness", collect_lines)
    minimal = Tally("search_minimality", collect_lines)
    modes = Tally("search_modes_agree", collect_lines)
    for req in requests:
        frame, crit, target = req.frame, req.criterion, req.target
        where = {
            "N": frame.N,
            "L": frame.L,
            "U": frame.U,
            "delta": _pq(req.delta),
            **crit.describe(),
        }
        result, trace = search_with_trace(req, threads=1, fast_path=False)
        n_min = result.n_min
        worst = full_scan_min(n_min, frame, crit)
        sound.check(
            worst[1] > target and worst[1] == result.min_coverage,
            {**where, "n_min": n_min},
            f"> {_pq(target)}",
            _pq(worst[1]),
        )
        if n_min > 2:
            below = full_scan_min(n_min - 1, frame, crit)
            minimal.check(
                below[1] <= target,
                {**where, "n_min": n_min},
                f"<= {_pq(target)}",
                _pq(below[1]),
            )
        accelerated = req.model_copy(update={"search_mode": SearchMode.ACCELERATED})
        fast = search_with_trace(accelerated, threads=1, fast_path=False)
        agree = (
            fast[0].n_min == n_min
            and fast[0].min_coverage == result.min_coverage
            and trace[-1].n == n_min
            and fast[1][-1].n == n_min
        )
        modes.check(agree, where, n_min, fast[0].n_min)
    return {"search_soundness": sound, "search_minimality": minimal, "search_modes_agree": modes}


def _monte_carlo(
    seed: int, N_max: int, collect_lines: bool, instances: int = 50, trials: int = 200_000
) -> Suites:
    tally = Tally("monte_carlo", collect_lines)
    rng = np.random.default_rng([seed, 2])
    outside = 0
    for i in range(instances):
        N = int(rng.integers(2, N_max + 1))
        n = int(rng.integers(1, N + 1))
        M = int(rng.integers(0, N + 1))
        eps = Fraction(int(rng.integers(1, 10)), 20)
        crit = (ErrorCriterion.absolute(eps), ErrorCriterion.relative(eps))[i % 2]
        exact = coverage(n, M, N, crit)
        estimate = monte_carlo_coverage(n, M, N, crit, trials=trials, seed=seed * 1000 + i)
        ok = estimate.within(exact)
        outside += not ok
        where = {"N": N, "n": n, "M": M, **crit.describe(), "estimate": _pq(estimate.estimate)}
        tally.note(ok, where)
    # at most one instance in fifty may fall outside four standard errors
    allowed = instances // 50
    tally.require(outside <= allowed, {"instances": instances}, f"<= {allowed} outside", outside)
    return {"monte_carlo": tally}


def _large_economy(max_population: Optional[int], collect_lines: bool) -> Suites:
    tally = Tally("large_population_economy", collect_lines)
    for N in (1000, 5000, 10000):
        if max_population is not None and N > max_population:
            continue
        frame = PopulationFrame(N=N, L=0, U=(N + 1) // 2)
        for eps in (Fraction(1, 10), Fraction(1, 100)):
            crit = ErrorCriterion.absolute(eps)
            for n in (2, 10, 50, 100, 200):
                found = min_coverage_over_frame(n, frame, crit, threads=1, fast_path=False)
                where = {"N": N, "n": n, **crit.describe()}
                bound = evaluation_bound(n)
                tally.check(found.evaluations <= bound, where, bound, found.evaluations)
    return {"large_population_economy": tally}


def _per_population(
    task: Callable[[int], Suites], populations: List[int], jobs: int, desc: str
) -> List[Suites]:
    progress = tqdm(populations, desc=desc, leave=False, disable=not sys.stderr.isatty())
    return Parallel(n_jobs=jobs, prefer="threads")(delayed(task)(N) for N in progress)


def _merge(parts: List[Suites], names: List[str], collect_lines: bool) -> List[Tally]:
    return [Tally(name, collect_lines).merge(p[name] for p in parts) for name in names]


def run_verification(
    tier: str = "fast",
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    max_population: Optional[int] = None,
    collect_lines: bool = False,
) -> VerificationReport:
    """
    Run every verification suite of a tier.

    Args:
        tier: "fast" or "slow"; slow widens the grids and adds simulation
        seed: Seed for random frames, sizing requests and simulation; defaults to config
        threads: Worker threads, 0 for all cores; defaults to config
        max_population: Upper cap on N for every grid
        collect_lines: Keep one summary line per checked instance

    Returns:
        VerificationReport; passed exactly when no suite recorded a failure
    """
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}, got {tier!r}")
    if max_population is not None and max_population < 2:
        raise ValueError(f"max_population must be >= 2, got {max_population}")
    seed = config.verify_seed if seed is None else seed
    jobs = config.threads if threads is None else threads
    jobs = -1 if jobs == 0 else jobs
    settings = _TIER_SETTINGS[tier]

    def capped(limit: int) -> int:
        return limit if max_population is None else min(limit, max_population)

    start = time.time()
    logger.info(
        "Verification started",
        extra={
            "event": "verification_start",
            "tier": tier,
            "seed": seed,
            "max_population": max_population,
        },
    )

    spec = GridSpec(N_max=capped(settings["grid_N"]), seed=seed)
    tallies: List[Tally] = []
    for kind in ("absolute", "relative", "mixed"):
        sweep = _Sweep(kind, spec, collect_lines)
        parts = _per_population(sweep, spec.populations, jobs, f"{kind} sweep")
        tallies += _merge(parts, sweep.names(), collect_lines)

    window_N = list(range(2, capped(settings["window_N"]) + 1))
    parts = _per_population(
        lambda N: _window_consistency(N, spec, collect_lines), window_N, jobs, "windows"
    )
    tallies += _merge(parts, ["window_consistency", "mixed_piecewise"], collect_lines)

    tallies += lemma_tallies(capped(settings["lemma_N"]), threads=jobs, collect_lines=collect_lines)

    requests = sizing_requests(
        settings["requests"], capped(settings["request_N"]), seed, spec.eps_list
    )
    search = _search_modes(requests, collect_lines)
    tallies += list(search.values())

    if tier == "slow":
        tallies += list(_monte_carlo(seed, capped(60), collect_lines).values())
        tallies += list(_large_economy(max_population, collect_lines).values())

    report = build_report(
        tallies, tier=tier, seed=seed, elapsed=time.time() - start, max_population=max_population
    )
    log = logger.info if report.passed else logger.warning
    log(
        "Verification completed",
        extra={
            "event": "verification_complete",
            "tier": tier,
            "instances_checked": report.instances_checked,
            "failures": len(report.failures),
            "candidate_evaluations": report.candidate_evaluations,
            "full_scan_evaluations": report.full_scan_evaluations,
            "elapsed_seconds": round(report.elapsed, 3),
        },
    )
    return report
