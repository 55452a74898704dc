"""Internal logging shim for fiberacf.

Logging is controlled by the FIBERACF_LOG_LEVEL environment variable and is off
by default: figure and validation commands may stream CSV to stdout, so
diagnostics only ever go to stderr and only when explicitly requested.
"""

import logging
import os
from enum import Enum
from typing import Protocol


class LogLevel(str, Enum):
    """Valid values for the FIBERACF_LOG_LEVEL environment variable."""

    TRACE = "trace"
    DEBUG = "debug"
    INFO = "info"
    WARN = "warn"
    ERROR = "error"
    OFF = "off"


class Logger(Protocol):
    """Logging interface used throughout the package.

    Messages use printf-style placeholders; arguments are only formatted when
    the message is actually emitted, which keeps per-trial trace calls cheap.
    """

    def trace(self, msg: str, *args: object) -> None:
        """Log a trace-level message (per-block Monte Carlo detail)."""
        ...

    def debug(self, msg: str, *args: object) -> None:
        """Log a debug-level message."""
        ...

    def info(self, msg: str, *args: object) -> None:
        """Log an info-level message."""
        ...

    def warn(self, msg: str, *args: object) -> None:
        """Log a warning-level message."""
        ...

    def error(self, msg: str, *args: object) -> None:
        """Log an error-level message."""
        ...


ENV_VAR = "FIBERACF_LOG_LEVEL"

# Custom TRACE level (below DEBUG=10).
_TRACE = 5
logging.addLevelName(_TRACE, "TRACE")

_RANKS: dict[str, int] = {
    LogLevel.TRACE.value: _TRACE,
    LogLevel.DEBUG.value: logging.DEBUG,
    LogLevel.INFO.value: logging.INFO,
    LogLevel.WARN.value: logging.WARNING,
    "warning": logging.WARNING,
    LogLevel.ERROR.value: logging.ERROR,
    LogLevel.OFF.value: 1000,
}

_METHODS: tuple[LogLevel, ...] = (LogLevel.TRACE, LogLevel.DEBUG, LogLevel.INFO, LogLevel.WARN, LogLevel.ERROR)


def _resolve_log_level(raw: str | None) -> str:
    """Normalise a raw FIBERACF_LOG_LEVEL value.

    Args:
        raw: Value read from the environment, possibly None or padded.

    Returns:
        A key of the rank table; ``"off"`` for missing or unknown values.
    """
    candidate = raw.strip().lower() if raw else None
    return candidate if candidate and candidate in _RANKS else LogLevel.OFF.value


def _get_level() -> str:
    """Read the active level from the environment on every call."""
    return _resolve_log_level(os.getenv(ENV_VAR))


class _DefaultLogger:
    """Stderr logger that re-checks FIBERACF_LOG_LEVEL before each message."""

    def __init__(self, backend: logging.Logger) -> None:
        self._backend = backend

    def _emit(self, level: LogLevel, msg: str, args: tuple[object, ...]) -> None:
        active = _get_level()
        if active == LogLevel.OFF.value:
            return
        rank = _RANKS[level.value]
        if _RANKS[active] <= rank:
            self._backend.setLevel(rank)
            self._backend.log(rank, msg, *args)

    def trace(self, msg: str, *args: object) -> None:
        """Log trace-level message."""
        self._emit(LogLevel.TRACE, msg, args)

    def debug(self, msg: str, *args: object) -> None:
        """Log debug-level message."""
        self._emit(LogLevel.DEBUG, msg, args)

    def info(self, msg: str, *args: object) -> None:
        """Log info-level message."""
        self._emit(LogLevel.INFO, msg, args)

    def warn(self, msg: str, *args: object) -> None:
        """Log warning-level message."""
        self._emit(LogLevel.WARN, msg, args)

    def error(self, msg: str, *args: object) -> None:
        """Log error-level message."""
        self._emit(LogLevel.ERROR, msg, args)


def _create_default_logger() -> Logger:
    """Build the package logger with a single stderr handler."""
    backend = logging.getLogger("fiberacf")
    if not backend.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        backend.addHandler(handler)
        backend.propagate = False
    return _DefaultLogger(backend)


class _PartialLoggerWrapper:
    """Routes each level to a custom logger when it implements it, else to the default."""

    def __init__(self, custom: object, default: Logger) -> None:
        """Initialize the wrapper.

        Args:
            custom: Object implementing any subset of the Logger methods.
            default: Logger used for the methods ``custom`` lacks.
        """
        self._custom = custom
        self._default = default

    def _target(self, level: LogLevel) -> object:
        return self._custom if hasattr(self._custom, level.value) else self._default

    def trace(self, msg: str, *args: object) -> None:
        """Log trace-level message."""
        self._target(LogLevel.TRACE).trace(msg, *args)

    def debug(self, msg: str, *args: object) -> None:
        """Log debug-level message."""
        self._target(LogLevel.DEBUG).debug(msg, *args)

    def info(self, msg: str, *args: object) -> None:
        """Log info-level message."""
        self._target(LogLevel.INFO).info(msg, *args)

    def warn(self, msg: str, *args: object) -> None:
        """Log warning-level message."""
        self._target(LogLevel.WARN).warn(msg, *args)

    def error(self, msg: str, *args: object) -> None:
        """Log error-level message."""
        self._target(LogLevel.ERROR).error(msg, *args)


def create_logger(impl: Logger | object | None = None) -> Logger:
    """Return a Logger, optionally backed by a caller-supplied implementation.

    Args:
        impl: None for the FIBERACF_LOG_LEVEL-controlled default, a complete
            Logger, or a partial object; methods it lacks fall back to the default.

    Returns:
        A Logger with all five methods available.

    Example:
        >>> from fiberacf import MonteCarloEngine
        >>> class Progress:
        ...     def debug(self, msg, *args): print(msg % args)
        >>> engine = MonteCarloEngine(threads=4, logger=Progress())
    """
    if impl is None:
        return _default_logger
    if all(hasattr(impl, level.value) for level in _METHODS):
        return impl
    return _PartialLoggerWrapper(impl, _default_logger)


_default_logger: Logger = _create_default_logger()
