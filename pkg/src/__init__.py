"""
Exact Sample Size - minimum sample sizes for finite-population proportions

Computes, with exact rational arithmetic, the smallest sample size whose
coverage probability exceeds a confidence level for every attribute count
in a known interval, evaluating coverage only at candidate points.
"""

__version__ = "1.0.0"

from . import cli, engine, oracle

__all__ = [
    "cli",
    "engine",
    "oracle",
    "__version__",
]
