"""Lib module - configuration and logging.

TIER 1: May import from core only.
"""

from lib.config import DEFAULTS, clear_cache, get, load_config
from lib.logger import (
    disable_trace,
    enable_trace,
    get_logger,
    get_trace_logger,
    set_log_level,
    trace_enabled,
)

__all__ = [
    "DEFAULTS",
    "clear_cache",
    "disable_trace",
    "enable_trace",
    "get",
    "get_logger",
    "get_trace_logger",
    "load_config",
    "set_log_level",
    "trace_enabled",
]
