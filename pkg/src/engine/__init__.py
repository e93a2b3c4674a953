"""Exact sample-size engine: combinatorics, coverage, candidate sets and the n search."""

from src.engine.candidates import (
    CandidateRule,
    CandidateSet,
    Provenance,
    candidate_set_absolute,
    candidate_set_for,
    candidate_set_mixed,
    candidate_set_relative,
    reflect_frame,
)
from src.engine.combinatorics import ExactRatio, HyperParams, binom, hyper_pmf
from src.engine.coverage import (
    AcceptanceWindow,
    CriterionKind,
    ErrorCriterion,
    PopulationFrame,
    acceptance_window,
    coverage,
    mixed_piecewise_check,
)
from src.engine.errors import (
    CandidatePreconditionError,
    InfeasibleCriterionError,
    SampleSizeError,
    UnreachableSampleSizeError,
)
from src.engine.sizing import (
    SampleSizeResult,
    SearchMode,
    SizingRequest,
    min_coverage_over_frame,
    minimum_sample_size,
    search_with_trace,
    sizing_trace,
)

__all__ = [
    "AcceptanceWindow",
    "CandidatePreconditionError",
    "CandidateRule",
    "CandidateSet",
    "CriterionKind",
    "ErrorCriterion",
    "ExactRatio",
    "HyperParams",
    "InfeasibleCriterionError",
    "PopulationFrame",
    "Provenance",
    "SampleSizeError",
    "SampleSizeResult",
    "SearchMode",
    "SizingRequest",
    "UnreachableSampleSizeError",
    "acceptance_window",
    "binom",
    "candidate_set_absolute",
    "candidate_set_for",
    "candidate_set_mixed",
    "candidate_set_relative",
    "coverage",
    "hyper_pmf",
    "min_coverage_over_frame",
    "minimum_sample_size",
    "mixed_piecewise_check",
    "reflect_frame",
    "search_with_trace",
    "sizing_trace",
]
