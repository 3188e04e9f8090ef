"""Batch driver: runs a script command by command.

TIER 4: May import from all tiers.

Each command extends the session (environment, coercions, proof problem)
only when it succeeds. The report goes to ``out`` once the run is over,
errors to ``err`` as they happen.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import TextIO

from cli.parser import (
    CheckCommand,
    CoercionCommand,
    Command,
    ConstraintCommand,
    MetaCommand,
    ObjectCommand,
    UniverseCommand,
    parse,
)
from cli.report import Report
from cli.scope import resolve_object, resolve_term
from core.errors import (
    FuelExhausted,
    ObligationsError,
    ParseError,
    RefinerToolError,
    ScopeError,
)
from core.metas import MetaDecl
from core.objects import object_names
from core.terms import Term
from core.types import ExitCode
from kernel.environment import GlobalEnv
from lib.logger import get_logger
from refine.coercions import CoercionDB, declare_coercion
from refine.objects import refine_obj
from refine.refiner import Refiner, RefinerOptions
from refine.state import RefinerState

logger = get_logger("driver")


@dataclass(frozen=True)
class RunFlags:
    """Command-line switches; None leaves the configured value."""

    mono: bool | None = None
    max_steps: int | None = None
    allow_obligations: bool = False
    keep_going: bool = False


@dataclass
class Session:
    """State carried from one command to the next."""

    options: RefinerOptions
    env: GlobalEnv = field(default_factory=GlobalEnv)
    coercions: CoercionDB = field(default_factory=CoercionDB)
    state: RefinerState = field(default_factory=RefinerState)
    declared: list[int] = field(default_factory=list)
    steps: int = 0

    def refiner(self) -> Refiner:
        refiner = Refiner(self.env, self.coercions, self.options)
        refiner.steps = self.steps
        return refiner

    def execute(self, command: Command, report: Report, allow_obligations: bool) -> None:
        """Run one command, updating the session only on success.

        Raises:
            RefinerToolError: The command failed; the session is unchanged.
        """
        match command:
            case ObjectCommand(obj=obj):
                self._object(obj, report, allow_obligations)
            case CheckCommand(term=term, ty=ty):
                self._check(term, ty, report)
            case MetaCommand(index=index, ty=ty):
                self._meta(index, ty)
            case CoercionCommand():
                db, env = declare_coercion(
                    self.coercions,
                    self.env,
                    command.name,
                    command.k,
                    command.priority,
                    command.source,
                    command.arity,
                )
                for entry in db.entries[len(self.coercions) :]:
                    report.add_note(f"coercion {entry.describe()}")
                self.coercions, self.env = db, env
            case UniverseCommand(name=name):
                self.env = self.env.with_universe(name)
                report.add_note(f"universe {name}.")
            case ConstraintCommand(lower=lower, upper=upper, strict=strict):
                self.env = self.env.with_constraint(lower, upper, strict)
                report.add_note(f"constraint {lower} {'<' if strict else '<='} {upper}.")

    def _object(self, obj, report: Report, allow_obligations: bool) -> None:
        refiner = self.refiner()
        resolved = resolve_object(self.env, obj)
        self.env.check_fresh(resolved)
        refined, st = refine_obj(refiner, self.state, resolved)
        self.steps = refiner.steps
        obligations = st.new_metas(self.state)
        if obligations:
            if not allow_obligations:
                raise ObligationsError(
                    f"{', '.join(object_names(refined))} has {len(obligations)} open "
                    "obligation(s); use --allow-obligations to list them",
                    rule="obligations",
                )
            report.add_object(refined, st.problem, obligations)
            report.add_note("(not added)")
            return
        self.env = self.env.add_object(refined)
        report.add_object(refined, st.problem, [])

    def _check(self, term: Term, ty: Term | None, report: Report) -> None:
        refiner = self.refiner()
        t = resolve_term(self.env, term)
        if ty is None:
            r = refiner.infer(self.state, (), t)
        else:
            expected, _, st = refiner.enforce_type(self.state, (), resolve_term(self.env, ty))
            r = refiner.force(st, (), t, expected)
        self.steps = refiner.steps
        st = r.state
        assigned = [
            (index, st.instantiate(st.subst[index].body))
            for index in self.declared
            if index in st.subst and index not in self.state.subst
        ]
        report.add_check(
            st.instantiate(r.term),
            st.instantiate(r.ty),
            st.problem,
            st.new_metas(self.state),
            assigned,
        )
        self.state = st

    def _meta(self, index: int, ty: Term) -> None:
        if index in self.state.problem or index in self.state.subst:
            raise ScopeError(f"?{index} is already declared")
        refiner = self.refiner()
        t, _, st = refiner.enforce_type(self.state, (), resolve_term(self.env, ty))
        self.steps = refiner.steps
        problem = st.problem.with_decl(index, MetaDecl((), st.instantiate(t)))
        self.state = RefinerState(problem, st.subst, st.next_index)
        self.declared.append(index)


def describe_error(command: Command, error: RefinerToolError) -> str:
    """One-line localized error message."""
    parts = [f"error: line {command.line}: {command.kind.value}"]
    span = getattr(error, "span", None)
    if span is not None:
        parts.append(f"at {span}")
    rule = getattr(error, "rule", "")
    if rule:
        parts.append(f"[{rule}]")
    return f"{' '.join(parts)}: {error}"


def run(
    source: str,
    flags: RunFlags | None = None,
    out: TextIO | None = None,
    err: TextIO | None = None,
) -> ExitCode:
    """Parse and run a script; write the report to ``out``.

    Returns:
        OK when every command succeeded, REFINE_FAILURE when some command
        failed, PARSE_FAILURE on a syntax error, INTERNAL when a step budget
        ran out.
    """
    flags = flags or RunFlags()
    out = out or sys.stdout
    err = err or sys.stderr

    try:
        script = parse(source)
    except ParseError as e:
        print(f"error: {e}", file=err)
        return ExitCode.PARSE_FAILURE

    session = Session(RefinerOptions.from_config(mono=flags.mono, max_steps=flags.max_steps))
    report = Report()
    code = ExitCode.OK
    for command in script:
        logger.info(f"line {command.line}: {command.kind.value}")
        try:
            session.execute(command, report, flags.allow_obligations)
        except FuelExhausted as e:
            print(f"error: line {command.line}: {e}", file=err)
            code = ExitCode.INTERNAL
            break
        except RefinerToolError as e:
            print(describe_error(command, e), file=err)
            code = ExitCode.REFINE_FAILURE
            if not flags.keep_going:
                break
    out.write(report.render())
    return code


__all__ = ["RunFlags", "Session", "describe_error", "run"]
