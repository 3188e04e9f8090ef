"""Human and machine readable report of a script run.

TIER 4: May import from all tiers.

Metavariables are renumbered in order of first occurrence within each
command's output, so reports do not depend on internal counters.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from core.metas import MetaDecl, ProofProblem
from core.objects import Axiom, Definition, GlobalObject, InductiveBlock, RecBlock
from core.pretty import Printer
from core.terms import Context, Def, Meta, Term, subterms


def _ordered_metas(roots: Iterable[Term]) -> list[int]:
    """Meta indices in printing (pre-)order, without repetition."""
    seen: dict[int, None] = {}

    def visit(t: Term) -> None:
        if isinstance(t, Meta):
            seen.setdefault(t.index, None)
        for child in subterms(t):
            visit(child)

    for root in roots:
        visit(root)
    return list(seen)


def _context_terms(ctx: Context) -> list[Term]:
    terms: list[Term] = []
    for entry in ctx:
        terms.append(entry.ty)
        if isinstance(entry, Def):
            terms.append(entry.value)
    return terms


def _object_terms(obj: GlobalObject) -> list[Term]:
    match obj:
        case Axiom(ty=ty):
            return [ty]
        case Definition(ty=ty, body=body):
            return [ty, body]
        case InductiveBlock():
            terms = _context_terms(obj.params)
            for ind in obj.types:
                terms.append(ind.arity)
                terms.extend(k.ty for k in ind.constructors)
            return terms
        case RecBlock():
            terms = []
            for f in obj.functions:
                terms.extend(_context_terms(f.binders))
                terms.extend([f.return_ty, f.body])
            return terms
    return []


def renumbering(roots: Sequence[Term], obligations: Sequence[int]) -> dict[int, int]:
    """Map meta indices to 1, 2, ... by first occurrence; unseen obligations last."""
    order = _ordered_metas(roots)
    order.extend(index for index in sorted(obligations) if index not in order)
    return {index: n for n, index in enumerate(order, start=1)}


def _binders(printer: Printer, ctx: Context, names: list[str]) -> tuple[str, list[str]]:
    parts = []
    scope = list(names)
    for entry in ctx:
        ty = printer.term(entry.ty, scope)
        parts.append(f"({entry.name} : {ty})")
        scope.append(entry.name)
    return " ".join(parts), scope


def format_object(obj: GlobalObject, printer: Printer | None = None) -> list[str]:
    """Print an object in re-parseable surface syntax."""
    printer = printer or Printer()
    match obj:
        case Axiom(name=name, ty=ty):
            return [f"axiom {name} : {printer.term(ty)}."]
        case Definition(name=name, ty=ty, body=body):
            return [f"definition {name} : {printer.term(ty)} := {printer.term(body)}."]
        case InductiveBlock():
            keyword = "coinductive" if obj.coinductive else "inductive"
            params, names = _binders(printer, obj.params, [])
            lines = []
            for i, ind in enumerate(obj.types):
                head = f"{keyword} " if i == 0 else "with "
                prefix = f"{ind.name} {params}".rstrip()
                lines.append(f"{head}{prefix} : {printer.term(ind.arity, names)} :=")
                lines.extend(f"  | {k.name} : {printer.term(k.ty, names)}" for k in ind.constructors)
            lines[-1] += "."
            return lines
        case RecBlock():
            keyword = "let corec" if obj.corecursive else "let rec"
            lines = []
            for i, f in enumerate(obj.functions):
                head = f"{keyword} " if i == 0 else "and "
                binders, names = _binders(printer, f.binders, [])
                on = f" on {f.binders[f.rec_arg].name}" if f.rec_arg is not None else ""
                lines.append(
                    f"{head}{f.name} {binders}{on} : {printer.term(f.return_ty, names)} :="
                )
                lines.append(f"  {printer.term(f.body, names)}")
            lines[-1] += "."
            return lines
    raise TypeError(f"not an object: {obj!r}")


def format_obligations(
    printer: Printer, problem: ProofProblem, obligations: Sequence[int]
) -> list[str]:
    ordered = sorted(obligations, key=lambda i: printer.renumber.get(i, i))
    return [f"  {printer.meta_decl(i, problem[i])}" for i in ordered]


@dataclass
class Report:
    """Accumulated output lines of a run."""

    lines: list[str] = field(default_factory=list)

    def add_object(
        self, obj: GlobalObject, problem: ProofProblem, obligations: Sequence[int]
    ) -> None:
        roots = [*_object_terms(obj), *_decl_terms(problem, obligations)]
        printer = Printer(renumbering(roots, obligations))
        self.lines.extend(format_object(obj, printer))
        self._obligations(printer, problem, obligations)

    def add_check(
        self,
        term: Term,
        ty: Term,
        problem: ProofProblem,
        obligations: Sequence[int],
        assigned: Sequence[tuple[int, Term]] = (),
    ) -> None:
        roots = [term, ty, *(Meta(i) for i, _ in assigned), *(v for _, v in assigned)]
        roots.extend(_decl_terms(problem, obligations))
        printer = Printer(renumbering(roots, obligations))
        self.lines.append(f"check {printer.term(term)} : {printer.term(ty)}.")
        for index, value in assigned:
            self.lines.append(f"  where ?{printer.renumber[index]} := {printer.term(value)}")
        self._obligations(printer, problem, obligations)

    def add_note(self, text: str) -> None:
        self.lines.append(text)

    def _obligations(
        self, printer: Printer, problem: ProofProblem, obligations: Sequence[int]
    ) -> None:
        if obligations:
            self.lines.append("obligations:")
            self.lines.extend(format_obligations(printer, problem, obligations))

    def render(self) -> str:
        return "".join(f"{line}\n" for line in self.lines)


def _decl_terms(problem: ProofProblem, obligations: Sequence[int]) -> list[Term]:
    terms: list[Term] = []
    for index in sorted(obligations):
        decl: MetaDecl = problem[index]
        terms.extend(_context_terms(decl.context))
        terms.append(decl.ty)
    return terms


__all__ = ["Report", "format_object", "renumbering"]
