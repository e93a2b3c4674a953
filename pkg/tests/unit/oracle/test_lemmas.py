"""Tests for the identity and inequality suite."""

from fractions import Fraction

import pytest

from src.oracle.lemmas import (
    SUITES,
    _endpoint_minima_hold,
    _unimodal,
    check_lemma_suite,
    lemma_eps_grid,
    lemma_tallies,
)


class TestLemmaSuite:
    """Test the exhaustive suite on small populations."""

    def test_small_populations_pass(self):
        """Test that N <= 8 reports zero failures."""
        report = check_lemma_suite(8, threads=1)
        assert report.passed
        assert report.tier == "lemmas"
        assert [s.name for s in report.suites] == list(SUITES)
        assert all(s.instances > 0 for s in report.suites)

    def test_threads_do_not_change_counts(self):
        """Test that per-N merging is independent of the thread count."""
        serial = check_lemma_suite(6, threads=1)
        parallel = check_lemma_suite(6, threads=3)
        assert serial.suites == parallel.suites

    def test_collected_lines(self):
        """Test that per-instance lines carry the suite name."""
        tallies = lemma_tallies(3, threads=1, collect_lines=True)
        lines = [line for t in tallies for line in t.lines]
        assert lines
        assert {line["suite"] for line in lines} == set(SUITES)
        assert all(line["ok"] for line in lines)

    def test_tail_monotonicity_covers_both_tails(self):
        """Test that lower and upper tail rows are both checked and pass."""
        tallies = {t.name: t for t in lemma_tallies(5, threads=1, collect_lines=True)}
        tails = tallies["tail_monotonicity"]
        assert tails.instances > 0
        assert not tails.failures
        assert {line["part"] for line in tails.lines} == {"lower", "upper"}

    def test_rejects_tiny_grid(self):
        """Test that N_max must be at least 2."""
        with pytest.raises(ValueError):
            lemma_tallies(1)


class TestHelpers:
    """Test the sequence checks used by the suite."""

    def test_unimodal(self):
        """Test rise-then-fall detection."""
        assert _unimodal([1, 3, 3, 2, 0])
        assert _unimodal([5, 4, 4])
        assert not _unimodal([1, 3, 2, 3])

    def test_endpoint_minima(self):
        """Test that interior dips are caught."""
        assert _endpoint_minima_hold([1, 4, 6, 5, 2])
        assert not _endpoint_minima_hold([3, 1, 3])

    def test_eps_grid(self):
        """Test that the radius grid stays in (0, 1) and hits integer boundaries."""
        grid = lemma_eps_grid(10, 4)
        assert all(0 < eps < 1 for eps in grid)
        assert Fraction(1, 10) in grid
        assert Fraction(1, 4) - Fraction(1, 10) in grid
        assert grid == sorted(grid)
