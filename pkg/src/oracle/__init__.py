"""Independent verifiers: full scans, identity checks and simulation."""

from src.oracle.grid import GridSpec, Instance
from src.oracle.lemmas import check_lemma_suite
from src.oracle.monte_carlo import MonteCarloEstimate, monte_carlo_coverage
from src.oracle.report import Failure, SuiteSummary, VerificationReport
from src.oracle.verification import full_scan_min, run_verification

__all__ = [
    "Failure",
    "GridSpec",
    "Instance",
    "MonteCarloEstimate",
    "SuiteSummary",
    "VerificationReport",
    "check_lemma_suite",
    "full_scan_min",
    "monte_carlo_coverage",
    "run_verification",
]
