#!/usr/bin/env python3
"""``refine`` command-line entry point.

TIER 4: May import from all tiers.

Usage:
    refine check FILE [--trace | --trace-file PATH] [--mono]
                      [--allow-obligations] [--keep-going] [--max-steps N]
"""

from __future__ import annotations

import argparse
import os
import sys
from collections.abc import Sequence
from contextlib import ExitStack
from pathlib import Path

from cli.driver import RunFlags, run
from core.errors import ConfigError
from core.types import ExitCode
from lib import config
from lib.logger import LEVEL_ENV_VAR, disable_trace, enable_trace, set_log_level


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refine", description="Refine scripts of external terms into kernel terms."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="refine every command of a script")
    check.add_argument("file", type=Path, help="script to refine")
    trace = check.add_mutually_exclusive_group()
    trace.add_argument("--trace", action="store_true", help="trace rule applications to stderr")
    trace.add_argument("--trace-file", type=Path, help="trace rule applications to a file")
    check.add_argument("--mono", action="store_true", help="disable the bi-directional rules")
    check.add_argument(
        "--allow-obligations",
        action="store_true",
        help="report objects with open obligations instead of failing",
    )
    check.add_argument(
        "--keep-going", action="store_true", help="continue after a failing command"
    )
    check.add_argument("--max-steps", type=int, help="refiner step budget")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI; returns the process exit code."""
    args = build_parser().parse_args(argv)

    try:
        if LEVEL_ENV_VAR not in os.environ:
            set_log_level(str(config.get("logging.level", "WARNING")).upper())
        source = args.file.read_text(encoding="utf-8")
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.INTERNAL
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror}", file=sys.stderr)
        return ExitCode.PARSE_FAILURE

    flags = RunFlags(
        mono=True if args.mono else None,
        max_steps=args.max_steps,
        allow_obligations=args.allow_obligations,
        keep_going=args.keep_going,
    )
    with ExitStack() as stack:
        handler = None
        if args.trace_file:
            stream = stack.enter_context(args.trace_file.open("w", encoding="utf-8"))
            handler = enable_trace(stream)
        elif args.trace:
            handler = enable_trace(sys.stderr)
        try:
            code = run(source, flags, sys.stdout, sys.stderr)
        finally:
            if handler is not None:
                disable_trace(handler)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
