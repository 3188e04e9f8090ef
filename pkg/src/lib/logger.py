"""Logging utilities for the refiner.

TIER 1: May import from core only.

Component loggers are named ``refiner.<component>``. The trace logger
(``refiner.trace``) carries one bare line per refinement rule application and
is silent until ``enable_trace`` attaches a stream to it.
"""

import logging
import os
import sys
from typing import Literal, TextIO

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]

DEFAULT_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DEFAULT_DATE_FORMAT = "%H:%M:%S"
TRACE_FORMAT = "%(message)s"
LEVEL_ENV_VAR = "REFINER_LOG_LEVEL"

# Cache for loggers
_loggers: dict[str, logging.Logger] = {}

_trace = logging.getLogger("refiner.trace")
_trace.propagate = False
_trace.setLevel(logging.CRITICAL)
# Level to restore when the last trace handler is detached
_saved_level = [logging.CRITICAL]


def get_logger(name: str, level: LogLevel | None = None) -> logging.Logger:
    """Get a configured logger.

    Args:
        name: Logger name (will be prefixed with 'refiner.')
        level: Log level override (default: REFINER_LOG_LEVEL env or WARNING)

    Example:
        >>> logger = get_logger("coercions")
        >>> logger.warning("overlapping coercions: %s, %s", "c1", "c2")
        20:55:39 | WARNING  | refiner.coercions | overlapping coercions: c1, c2
    """
    full_name = f"refiner.{name}"
    if full_name in _loggers:
        return _loggers[full_name]

    logger = logging.getLogger(full_name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(DEFAULT_FORMAT, datefmt=DEFAULT_DATE_FORMAT))
        logger.addHandler(handler)

        if level:
            logger.setLevel(getattr(logging, level))
        else:
            env_level = os.environ.get(LEVEL_ENV_VAR, "WARNING")
            logger.setLevel(getattr(logging, env_level.upper(), logging.WARNING))

        logger.propagate = False

    _loggers[full_name] = logger
    return logger


def set_log_level(level: LogLevel) -> None:
    """Set log level for all refiner component loggers."""
    log_level = getattr(logging, level, logging.WARNING)
    for logger in _loggers.values():
        logger.setLevel(log_level)


def get_trace_logger() -> logging.Logger:
    return _trace


def enable_trace(stream: TextIO | None = None) -> logging.Handler:
    """Route trace lines to a stream (stderr by default).

    Returns:
        The attached handler, to pass to ``disable_trace``.
    """
    if not _trace.handlers:
        _saved_level[0] = _trace.level
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(TRACE_FORMAT))
    _trace.addHandler(handler)
    _trace.setLevel(logging.INFO)
    _trace.propagate = False
    return handler


def disable_trace(handler: logging.Handler | None = None) -> None:
    """Detach one trace handler, or all of them.

    The level the trace logger had before the first ``enable_trace`` comes
    back once the last handler is gone.
    """
    handlers = [handler] if handler else list(_trace.handlers)
    for h in handlers:
        _trace.removeHandler(h)
        h.flush()
    if not _trace.handlers:
        _trace.setLevel(_saved_level[0])
        _trace.propagate = False


def trace_enabled() -> bool:
    """True while a stream is attached; the logger level alone does not count."""
    return bool(_trace.handlers) and _trace.isEnabledFor(logging.INFO)
