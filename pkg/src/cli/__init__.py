"""CLI module - surface syntax and the ``refine`` command.

TIER 4: May import from all tiers.

Exports:
- parse / parse_term: lark-based parser producing external terms with spans
- Scope / resolve_object / resolve_term: identifier resolution
- Report: renumbered, re-parseable output of refined objects and obligations
- run / RunFlags: the batch driver
"""

from cli.driver import RunFlags, Session, run
from cli.parser import parse, parse_term
from cli.report import Report, format_object
from cli.scope import Scope, resolve_object, resolve_term

__all__ = [
    "Report",
    "RunFlags",
    "Scope",
    "Session",
    "format_object",
    "parse",
    "parse_term",
    "resolve_object",
    "resolve_term",
    "run",
]
