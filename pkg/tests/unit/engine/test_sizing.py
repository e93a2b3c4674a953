"""Tests for the minimum sample size search."""

import logging
from fractions import Fraction

import pytest

from src.engine.candidates import CandidateRule
from src.engine.coverage import ErrorCriterion, PopulationFrame, coverage
from src.engine.errors import InfeasibleCriterionError, UnreachableSampleSizeError
from src.engine.sizing import (
    SearchMode,
    SizingRequest,
    min_coverage_over_frame,
    minimum_sample_size,
    search_with_trace,
    sizing_trace,
)


def scan_minimum(n, frame, crit):
    """Smallest M attaining the minimum coverage over every M of the frame."""
    values = [(coverage(n, M, frame.N, crit), M) for M in range(frame.L, frame.U + 1)]
    value, worst_M = min(values)
    return worst_M, value


def scan_sample_size(frame, crit, delta):
    """First n from 2 upward whose full-scan minimum exceeds 1 - delta."""
    for n in range(2, frame.N + 1):
        worst_M, value = scan_minimum(n, frame, crit)
        if value > 1 - delta:
            return n, value
    return None


class TestSizingRequest:
    """Test request validation."""

    def test_defaults(self, clean_env):
        """Test that the search mode defaults to ascending."""
        req = SizingRequest(
            frame=PopulationFrame.full(10),
            criterion=ErrorCriterion.absolute(Fraction(1, 10)),
            delta=Fraction(1, 20),
        )
        assert req.search_mode is SearchMode.ASCENDING
        assert req.target == Fraction(19, 20)

    def test_mode_from_environment(self, clean_env):
        """Test that SAMPLESIZE_SEARCH selects the default mode."""
        clean_env.setenv("SAMPLESIZE_SEARCH", "accelerated")
        req = SizingRequest(
            frame=PopulationFrame.full(10),
            criterion=ErrorCriterion.absolute(Fraction(1, 10)),
            delta="1/20",
        )
        assert req.search_mode is SearchMode.ACCELERATED

    @pytest.mark.parametrize("delta", [0, 1, Fraction(3, 2), 0.05])
    def test_invalid_delta(self, delta):
        """Test that delta must be an exact rational strictly inside (0, 1)."""
        with pytest.raises(ValueError):
            SizingRequest(
                frame=PopulationFrame.full(10),
                criterion=ErrorCriterion.absolute(Fraction(1, 10)),
                delta=delta,
            )


class TestMinCoverageOverFrame:
    """Test the candidate-based frame minimum."""

    def test_matches_full_scan(self):
        """Test exact agreement with a full scan, with and without folding."""
        N = 30
        frames = [PopulationFrame.full(N), PopulationFrame(N=N, L=4, U=27)]
        criteria = [
            ErrorCriterion.absolute(Fraction(1, 10)),
            ErrorCriterion.mixed(Fraction(1, 20), Fraction(1, 4)),
        ]
        for n in range(1, N + 1):
            for frame in frames:
                for crit in criteria:
                    _, expected = scan_minimum(n, frame, crit)
                    for symmetry in (True, False):
                        found = min_coverage_over_frame(n, frame, crit, symmetry=symmetry)
                        assert found.value == expected
                        assert coverage(n, found.worst_M, N, crit) == expected
                        assert frame.L <= found.worst_M <= frame.U

    def test_relative_frame(self):
        """Test the relative criterion on a frame starting at L = 1."""
        frame = PopulationFrame(N=30, L=1, U=30)
        crit = ErrorCriterion.relative(Fraction(1, 4))
        for n in range(1, 31):
            assert min_coverage_over_frame(n, frame, crit).value == scan_minimum(n, frame, crit)[1]

    def test_census(self):
        """Test that n = N gives coverage 1 with worst_M = L."""
        frame = PopulationFrame(N=10, L=3, U=7)
        found = min_coverage_over_frame(10, frame, ErrorCriterion.absolute(Fraction(1, 20)))
        assert (found.worst_M, found.value) == (3, 1)

    def test_single_point_frame(self):
        """Test that [M0, M0] reports the coverage at M0."""
        frame = PopulationFrame(N=20, L=6, U=6)
        crit = ErrorCriterion.absolute(Fraction(1, 10))
        found = min_coverage_over_frame(5, frame, crit)
        assert (found.worst_M, found.value) == (6, coverage(5, 6, 20, crit))

    def test_zero_count_is_not_evaluated(self):
        """Test that M = 0 is filled in without a coverage evaluation."""
        frame = PopulationFrame(N=10, L=0, U=0)
        found = min_coverage_over_frame(4, frame, ErrorCriterion.absolute(Fraction(1, 10)))
        assert (found.value, found.evaluations, found.candidates) == (1, 0, 1)

    def test_evaluations_independent_of_population(self):
        """Test at most n + 2 evaluations on [0, ceil(N/2)] under the absolute criterion."""
        crit = ErrorCriterion.absolute(Fraction(1, 10))
        for N in (50, 200, 1000):
            for frame in (PopulationFrame.full(N), PopulationFrame(N=N, L=0, U=(N + 1) // 2)):
                for n in (2, 10, 40):
                    found = min_coverage_over_frame(n, frame, crit)
                    assert found.evaluations <= n + 2
                    assert found.rule is CandidateRule.ABSOLUTE

    def test_fast_path_keeps_exact_minimum(self):
        """Test that the log-space pre-screen does not change the reported minimum."""
        frame = PopulationFrame.full(60)
        crit = ErrorCriterion.absolute(Fraction(1, 20))
        for n in (5, 17, 33):
            exact = min_coverage_over_frame(n, frame, crit, fast_path=False)
            screened = min_coverage_over_frame(n, frame, crit, fast_path=True)
            assert screened.value == exact.value
            assert screened.evaluations <= exact.evaluations

    def test_threads_do_not_change_result(self):
        """Test that parallel evaluation gives the same minimum."""
        frame = PopulationFrame(N=40, L=2, U=40)
        crit = ErrorCriterion.relative(Fraction(1, 4))
        serial = min_coverage_over_frame(12, frame, crit, threads=1)
        parallel = min_coverage_over_frame(12, frame, crit, threads=4)
        assert serial == parallel

    def test_invalid_sample_size(self):
        """Test that n must lie in [1, N]."""
        with pytest.raises(ValueError):
            min_coverage_over_frame(0, PopulationFrame.full(10), ErrorCriterion.absolute("1/10"))


class TestMinimumSampleSize:
    """Test the n search."""

    def test_census_case(self):
        """Test N=2, [0, 2], eps=3/5, delta=1/100: n = 2 is a census."""
        req = SizingRequest(
            frame=PopulationFrame.full(2),
            criterion=ErrorCriterion.absolute(Fraction(3, 5)),
            delta=Fraction(1, 100),
        )
        result = minimum_sample_size(req)
        assert result.n_min == 2
        assert result.worst_M == 0
        assert result.min_coverage == 1
        assert result.coverage_evaluations == 1
        assert result.candidates_at_n_min == 2

    def test_matches_full_scan_search(self):
        """Test N=100, [0, 100], eps=1/10, delta=1/10 against a brute-force ascending search."""
        frame = PopulationFrame.full(100)
        crit = ErrorCriterion.absolute(Fraction(1, 10))
        expected_n, expected_value = scan_sample_size(frame, crit, Fraction(1, 10))
        result = minimum_sample_size(
            SizingRequest(frame=frame, criterion=crit, delta=Fraction(1, 10))
        )
        assert result.n_min == expected_n
        assert result.min_coverage == expected_value
        assert scan_minimum(expected_n - 1, frame, crit)[1] <= Fraction(9, 10)

    @pytest.mark.parametrize(
        "frame,crit,delta",
        [
            (PopulationFrame.full(40), ErrorCriterion.absolute("1/20"), "1/20"),
            (PopulationFrame(N=50, L=5, U=45), ErrorCriterion.relative("1/4"), "1/10"),
            (PopulationFrame(N=50, L=3, U=50), ErrorCriterion.relative("9/20"), "1/5"),
            (PopulationFrame.full(45), ErrorCriterion.mixed("1/10", "1/4"), "1/100"),
            (PopulationFrame(N=45, L=20, U=45), ErrorCriterion.mixed("1/10", "1/4"), "1/10"),
        ],
    )
    def test_accelerated_agrees_with_ascending(self, frame, crit, delta):
        """Test that both search modes return the same answer."""
        ascending = SizingRequest(
            frame=frame, criterion=crit, delta=delta, search_mode=SearchMode.ASCENDING
        )
        accelerated = ascending.model_copy(update={"search_mode": SearchMode.ACCELERATED})
        slow, fast = minimum_sample_size(ascending), minimum_sample_size(accelerated)
        assert fast.n_min == slow.n_min
        assert fast.min_coverage == slow.min_coverage
        assert scan_sample_size(frame, crit, Fraction(delta))[0] == slow.n_min

    def test_relative_with_zero_lower_end(self, caplog):
        """Test that M = 0 in the frame makes the relative criterion infeasible."""
        req = SizingRequest(
            frame=PopulationFrame.full(20),
            criterion=ErrorCriterion.relative(Fraction(1, 4)),
            delta=Fraction(1, 10),
        )
        with caplog.at_level(logging.ERROR, logger="exact-sample-size"):
            with pytest.raises(InfeasibleCriterionError) as exc_info:
                minimum_sample_size(req)
        assert exc_info.value.details == {"witness_M": 0}
        assert exc_info.value.to_dict()["code"] == "infeasible"
        assert any(getattr(r, "event", None) == "sizing_failed" for r in caplog.records)

    def test_population_too_small(self):
        """Test that N = 1 leaves no admissible n."""
        req = SizingRequest(
            frame=PopulationFrame.full(1),
            criterion=ErrorCriterion.absolute(Fraction(1, 10)),
            delta=Fraction(1, 10),
        )
        with pytest.raises(UnreachableSampleSizeError):
            minimum_sample_size(req)

    def test_fallback_is_logged(self, caplog):
        """Test that a degenerate mixed breakpoint is reported as a warning."""
        req = SizingRequest(
            frame=PopulationFrame(N=20, L=10, U=20),
            criterion=ErrorCriterion.mixed(Fraction(1, 10), Fraction(1, 4)),
            delta=Fraction(1, 10),
        )
        with caplog.at_level(logging.WARNING, logger="exact-sample-size"):
            result = minimum_sample_size(req)
        assert result.n_min >= 2
        events = [getattr(r, "event", None) for r in caplog.records]
        assert "mixed_breakpoint_fallback" in events


class TestSizingTrace:
    """Test the per-n trace."""

    def test_ascending_trace(self):
        """Test consecutive n from 2 with only the last one satisfied."""
        req = SizingRequest(
            frame=PopulationFrame.full(30),
            criterion=ErrorCriterion.absolute(Fraction(1, 10)),
            delta=Fraction(1, 10),
            search_mode=SearchMode.ASCENDING,
        )
        trace = sizing_trace(req)
        result = minimum_sample_size(req)
        assert [r.n for r in trace] == list(range(2, result.n_min + 1))
        assert trace[-1].satisfied
        assert not any(r.satisfied for r in trace[:-1])
        assert (trace[-1].worst_M, trace[-1].min_coverage) == (
            result.worst_M,
            result.min_coverage,
        )

    def test_accelerated_trace_ends_at_answer(self):
        """Test that the accelerated trace visits each n once and ends at n_min."""
        req = SizingRequest(
            frame=PopulationFrame.full(60),
            criterion=ErrorCriterion.absolute(Fraction(1, 20)),
            delta=Fraction(1, 20),
            search_mode=SearchMode.ACCELERATED,
        )
        result, trace = search_with_trace(req)
        assert trace[-1].n == result.n_min
        assert trace[-1].satisfied
        # the answer may be recorded again after the confirming scan
        per_n = {r.n: r.evaluations for r in trace}
        assert len(per_n) in (len(trace), len(trace) - 1)
        assert result.coverage_evaluations == sum(per_n.values())
