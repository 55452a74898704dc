import logging

import pytest

from fiberacf._logger import ENV_VAR, LogLevel, _PartialLoggerWrapper, _resolve_log_level, create_logger


class RecordingLogger:
    def __init__(self):
        self.messages = []

    def trace(self, msg, *args):
        self.messages.append(("trace", msg % args))

    def debug(self, msg, *args):
        self.messages.append(("debug", msg % args))

    def info(self, msg, *args):
        self.messages.append(("info", msg % args))

    def warn(self, msg, *args):
        self.messages.append(("warn", msg % args))

    def error(self, msg, *args):
        self.messages.append(("error", msg % args))


class WarnOnly:
    def __init__(self):
        self.warnings = []

    def warn(self, msg, *args):
        self.warnings.append(msg % args)


class TestResolveLogLevel:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            (None, "off"),
            ("", "off"),
            ("  INFO ", "info"),
            ("warning", "warning"),
            ("verbose", "off"),
            ("trace", "trace"),
        ],
    )
    def test_normalisation(self, raw, expected):
        """Test case folding, padding and fallback to off."""
        assert _resolve_log_level(raw) == expected


class TestCreateLogger:
    def test_complete_logger_passes_through(self):
        """Test that an object with all five methods is used as is."""
        custom = RecordingLogger()
        assert create_logger(custom) is custom

    def test_default_logger_is_shared(self):
        """Test that None gives the package logger."""
        assert create_logger() is create_logger(None)

    def test_partial_logger_is_wrapped(self):
        """Test that missing methods fall back to the default logger."""
        partial = WarnOnly()
        logger = create_logger(partial)
        assert isinstance(logger, _PartialLoggerWrapper)
        logger.warn("Skipping %s", "fig9")
        logger.info("not recorded")
        assert partial.warnings == ["Skipping fig9"]


class TestDefaultLogger:
    def test_off_by_default(self, monkeypatch, caplog):
        """Test that nothing is emitted without FIBERACF_LOG_LEVEL."""
        monkeypatch.delenv(ENV_VAR, raising=False)
        backend = logging.getLogger("fiberacf")
        monkeypatch.setattr(backend, "propagate", True)
        with caplog.at_level(1, logger="fiberacf"):
            create_logger().error("hidden")
        assert caplog.records == []

    def test_level_filtering(self, monkeypatch, caplog):
        """Test that messages below the configured level are dropped."""
        monkeypatch.setenv(ENV_VAR, LogLevel.WARN.value)
        backend = logging.getLogger("fiberacf")
        monkeypatch.setattr(backend, "propagate", True)
        logger = create_logger()
        with caplog.at_level(1, logger="fiberacf"):
            logger.info("dropped")
            logger.warn("Threshold at %.1f W", 18.2)
            logger.error("kept")
        assert [r.getMessage() for r in caplog.records] == ["Threshold at 18.2 W", "kept"]
        assert caplog.records[0].levelno == logging.WARNING

    def test_level_is_read_per_call(self, monkeypatch, caplog):
        """Test that a level change takes effect without recreating the logger."""
        backend = logging.getLogger("fiberacf")
        monkeypatch.setattr(backend, "propagate", True)
        logger = create_logger()
        with caplog.at_level(1, logger="fiberacf"):
            monkeypatch.setenv(ENV_VAR, "off")
            logger.debug("first")
            monkeypatch.setenv(ENV_VAR, "trace")
            logger.trace("second")
        assert [r.getMessage() for r in caplog.records] == ["second"]
        assert caplog.records[0].levelname == "TRACE"
