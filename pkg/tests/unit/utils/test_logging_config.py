"""Tests for logging configuration module."""

import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

from src.utils.logging_config import (
    LoggingConfig,
    StructuredFormatter,
    clear_correlation_id,
    get_correlation_id,
    get_logger,
    run_context,
    set_correlation_id,
    setup_application_logging,
)


def _record(msg="Test message"):
    return logging.LogRecord(
        name="test_logger",
        level=logging.INFO,
        pathname="test.py",
        lineno=1,
        msg=msg,
        args=(),
        exc_info=None,
    )


class TestStructuredFormatter:
    """Test structured JSON formatter."""

    def test_structured_formatter_init(self):
        """Test StructuredFormatter initialization."""
        assert StructuredFormatter().include_extra is True
        assert StructuredFormatter(include_extra=False).include_extra is False

    def test_format_with_extra(self):
        """Test JSON formatting with extra fields."""
        record = _record()
        record.event = "sizing_step"
        record.n = 12

        parsed = json.loads(StructuredFormatter().format(record))
        assert parsed["message"] == "Test message"
        assert parsed["level"] == "INFO"
        assert parsed["logger"] == "test_logger"
        assert parsed["extra"]["event"] == "sizing_step"
        assert parsed["extra"]["n"] == 12

    def test_format_without_extra(self):
        """Test JSON formatting without extra fields."""
        parsed = json.loads(StructuredFormatter(include_extra=False).format(_record()))
        assert parsed["message"] == "Test message"
        assert "extra" not in parsed

    def test_rationals_are_rendered_as_text(self):
        """Test that exact values in extra fields do not break JSON output."""
        record = _record()
        record.min_coverage = Fraction(2, 3)
        parsed = json.loads(StructuredFormatter().format(record))
        assert parsed["extra"]["min_coverage"] == "2/3"


class TestCorrelationTracking:
    """Test run correlation ID tracking."""

    def test_set_and_get_correlation_id(self):
        """Test that the formatter includes the active ID."""
        set_correlation_id("run-123")
        try:
            parsed = json.loads(StructuredFormatter().format(_record()))
            assert parsed["correlation_id"] == "run-123"
        finally:
            clear_correlation_id()

    def test_clear_correlation_id(self):
        """Test clearing correlation ID."""
        set_correlation_id("test-id")
        clear_correlation_id()
        parsed = json.loads(StructuredFormatter().format(_record()))
        assert parsed.get("correlation_id") is None

    def test_generated_id(self):
        """Test that a fresh UUID is generated when none is given."""
        corr_id = set_correlation_id()
        try:
            assert len(corr_id) == 36
            assert get_correlation_id() == corr_id
        finally:
            clear_correlation_id()

    def test_run_context_resets(self):
        """Test that run_context restores the previous ID on exit."""
        set_correlation_id("outer")
        try:
            with run_context("inner") as active:
                assert active == "inner"
                assert get_correlation_id() == "inner"
            assert get_correlation_id() == "outer"
        finally:
            clear_correlation_id()

    def test_run_context_generates_and_clears(self):
        """Test a generated ID that the formatter sees and that is gone after exit."""
        clear_correlation_id()
        with run_context() as active:
            assert len(active) == 36
            parsed = json.loads(StructuredFormatter().format(_record()))
            assert parsed["correlation_id"] == active
        assert get_correlation_id() is None


class TestLoggingConfig:
    """Test LoggingConfig class."""

    def test_init_default(self):
        """Test LoggingConfig initialization with defaults."""
        with patch.dict(os.environ, {}, clear=True):
            config = LoggingConfig()
            assert config.app_name == "exact-sample-size"
            assert config.log_level == "INFO"
            assert config.environment == "local"
            assert not config.use_json_format

    def test_init_with_env_vars(self):
        """Test LoggingConfig initialization with environment variables."""
        with patch.dict(
            os.environ,
            {
                "LOG_LEVEL": "DEBUG",
                "ENABLE_STRUCTURED_LOGGING": "false",
                "LOG_DIR": "/tmp/test-logs",
                "ENVIRONMENT": "development",
            },
        ):
            config = LoggingConfig("test-app")
            assert config.app_name == "test-app"
            assert config.log_level == "DEBUG"
            assert not config.use_json_format
            assert str(config.log_dir) == "/tmp/test-logs"

    def test_production_uses_json(self):
        """Test that production switches to structured output."""
        with patch.dict(os.environ, {"ENVIRONMENT": "production"}):
            assert LoggingConfig().use_json_format

    def test_logger_levels_for_test_environment(self):
        """Test that environment sections override the defaults."""
        with patch.dict(os.environ, {"ENVIRONMENT": "test"}):
            levels = LoggingConfig().logger_levels()
        assert levels["exact-sample-size"] == "WARNING"
        assert levels["joblib"] == "WARNING"

    def test_logger_levels_for_development(self):
        """Test the development override."""
        with patch.dict(os.environ, {"ENVIRONMENT": "development"}):
            assert LoggingConfig().logger_levels()["exact-sample-size"] == "DEBUG"

    def test_invalid_yaml(self):
        """Test that an unreadable YAML file yields no logger levels."""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write("invalid: yaml: content: [")
            yaml_path = f.name

        try:
            config = LoggingConfig()
            with patch.object(config, "config_file", Path(yaml_path)):
                config._load_config_file()
                assert config.yaml_config is None
                assert config.logger_levels() == {}
        finally:
            os.unlink(yaml_path)

    def test_setup_logging_uses_stderr(self):
        """Test that the console handler writes to stderr and the level follows LOG_LEVEL."""
        with patch.dict(os.environ, {"LOG_LEVEL": "DEBUG", "LOG_TO_FILE": "false"}):
            logger = LoggingConfig().setup_logging()

        assert logger.name == "exact-sample-size"
        assert logger.level == logging.DEBUG
        handlers = logging.getLogger().handlers
        assert len(handlers) == 1
        assert handlers[0].stream is sys.stderr

    def test_file_logging(self):
        """Test rotating log files under LOG_DIR."""
        with tempfile.TemporaryDirectory() as temp_dir:
            with patch.dict(
                os.environ,
                {"LOG_TO_FILE": "true", "LOG_DIR": temp_dir, "ENABLE_STRUCTURED_LOGGING": "true"},
            ):
                config = LoggingConfig()
                logger = config.setup_logging()
                logger.warning("Written to file", extra={"event": "file_check"})
                for handler in logging.getLogger().handlers:
                    handler.flush()

                log_file = Path(temp_dir) / "exact-sample-size.log"
                assert log_file.exists()
                assert "file_check" in log_file.read_text()
                for handler in logging.getLogger().handlers:
                    handler.close()


class TestLoggingUtilities:
    """Test logging utility functions."""

    def test_get_logger(self):
        """Test module loggers sit under the application logger."""
        logger = get_logger("engine.sizing")
        assert logger.name == "exact-sample-size.engine.sizing"

    def test_setup_application_logging(self):
        """Test setup_application_logging function."""
        with patch.dict(os.environ, {"LOG_LEVEL": "WARNING"}):
            logger = setup_application_logging()
            assert logger.level == logging.WARNING
