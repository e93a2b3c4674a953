"""Global test configuration and fixtures."""

import logging
import os
from fractions import Fraction

import pytest

# Set test environment variables before any src module reads them
os.environ["ENVIRONMENT"] = "test"
os.environ["LOG_LEVEL"] = os.getenv("TEST_LOG_LEVEL", "WARNING")
os.environ["CI"] = os.getenv("CI", "false")
os.environ.pop("SAMPLESIZE_SEARCH", None)
os.environ.pop("SAMPLESIZE_FAST_PATH", None)

from click.testing import CliRunner  # noqa: E402

from src.engine.coverage import ErrorCriterion, PopulationFrame  # noqa: E402


def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "ci: mark test to run in CI environment")
    config.addinivalue_line("markers", "local: mark test to run only locally")
    config.addinivalue_line("markers", "slow: mark test as slow running")


def pytest_collection_modifyitems(config, items):
    """Modify test collection based on environment."""
    ci_env = os.getenv("CI", "false").lower() == "true"
    run_slow = os.getenv("RUN_SLOW", "false").lower() == "true"

    skip_local = pytest.mark.skip(reason="Skipped in CI environment")
    skip_slow = pytest.mark.skip(reason="Slow tier; set RUN_SLOW=true to run")
    for item in items:
        if ci_env and "local" in item.keywords:
            item.add_marker(skip_local)
        if not run_slow and "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def small_frame():
    """Full frame [0, 10] of a population of ten units."""
    return PopulationFrame.full(10)


@pytest.fixture
def absolute_tenth():
    """Absolute criterion with radius 1/10."""
    return ErrorCriterion.absolute(Fraction(1, 10))


@pytest.fixture
def relative_half():
    """Relative criterion with radius 1/2."""
    return ErrorCriterion.relative(Fraction(1, 2))


@pytest.fixture
def runner():
    """Click runner with stdout and stderr kept apart."""
    return CliRunner()


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every SAMPLESIZE_* override for the duration of a test."""
    for key in list(os.environ):
        if key.startswith("SAMPLESIZE_"):
            monkeypatch.delenv(key, raising=False)
    return monkeypatch


@pytest.fixture(autouse=True)
def restore_logging():
    """Undo handler and level changes made by command invocations."""
    root = logging.getLogger()
    app = logging.getLogger("exact-sample-size")
    handlers, root_level, app_level = list(root.handlers), root.level, app.level
    yield
    root.handlers[:] = handlers
    root.setLevel(root_level)
    app.setLevel(app_level)
