"""Term syntax.

TIER 0: No internal imports, only Python stdlib.

Terms are immutable dataclasses over nameless (de Bruijn) variables. Binder
names are kept for printing only and never take part in equality, so ``==``
on terms is alpha-equivalence. ``Rel(0)`` is the innermost bound variable;
contexts are tuples of entries, outermost first.

Placeholder and PlaceholderVec belong to the external syntax only; every
kernel operation rejects them.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Source position of a parsed subterm (1-based)."""

    line: int
    column: int
    end_line: int = 0
    end_column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Term:
    """Base class of all terms."""

    span: Span | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Rel(Term):
    """Bound variable as a de Bruijn index."""

    index: int
    name: str = field(default="_", compare=False)


@dataclass(frozen=True)
class Const(Term):
    """Global name: definition, axiom, inductive, constructor or (co)fixpoint."""

    name: str


@dataclass(frozen=True)
class Sort(Term):
    """``Prop`` when universe is None, ``Type(universe)`` otherwise."""

    universe: str | None = None

    @property
    def is_prop(self) -> bool:
        return self.universe is None


@dataclass(frozen=True)
class App(Term):
    """N-ary application; the head is never itself an App."""

    head: Term
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Lambda(Term):
    name: str = field(compare=False)
    ty: Term
    body: Term


@dataclass(frozen=True)
class Prod(Term):
    name: str = field(compare=False)
    ty: Term
    body: Term


@dataclass(frozen=True)
class LetIn(Term):
    name: str = field(compare=False)
    ty: Term
    value: Term
    body: Term


@dataclass(frozen=True)
class Binder:
    """Pattern variable of a match branch."""

    name: str = field(compare=False)
    ty: Term


@dataclass(frozen=True)
class Branch:
    """``k (y1 : T1) ... (yn : Tn) => body``; body lives under the binders."""

    constructor: str
    binders: tuple[Binder, ...]
    body: Term


@dataclass(frozen=True)
class Match(Term):
    """Case analysis on an inductive; branches follow constructor order."""

    scrutinee: Term
    ind: str
    return_ty: Term
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Meta(Term):
    """Metavariable occurrence with its explicit local substitution.

    Entry i of ``local_subst`` instantiates entry i (outermost first) of the
    metavariable's declared context.
    """

    index: int
    local_subst: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Placeholder(Term):
    """``?`` in external syntax."""


@dataclass(frozen=True)
class PlaceholderVec(Term):
    """``...`` in external syntax; only valid as an application argument."""


# Contexts


@dataclass(frozen=True)
class Decl:
    """Context entry ``x : ty``."""

    name: str = field(compare=False)
    ty: Term


@dataclass(frozen=True)
class Def:
    """Context entry ``x : ty := value``."""

    name: str = field(compare=False)
    value: Term
    ty: Term


ContextEntry = Decl | Def
Context = tuple[ContextEntry, ...]

PROP = Sort(None)


def type_sort(universe: str = "0") -> Sort:
    """``Type(universe)``."""
    return Sort(universe)


def mk_app(head: Term, args: Sequence[Term]) -> Term:
    """Build an application, flattening nested heads."""
    if not args:
        return head
    if isinstance(head, App):
        return App(head.head, head.args + tuple(args), span=head.span)
    return App(head, tuple(args))


def decompose_app(t: Term) -> tuple[Term, tuple[Term, ...]]:
    """Split ``h a1 ... an`` into ``(h, (a1, ..., an))``."""
    if isinstance(t, App):
        return t.head, t.args
    return t, ()


def mk_prods(binders: Iterable[ContextEntry | tuple[str, Term]], body: Term) -> Term:
    """Wrap body in products, first binder outermost."""
    return _wrap(Prod, binders, body)


def mk_lambdas(binders: Iterable[ContextEntry | tuple[str, Term]], body: Term) -> Term:
    """Wrap body in abstractions, first binder outermost."""
    return _wrap(Lambda, binders, body)


def _wrap(kind: type[Prod] | type[Lambda], binders, body: Term) -> Term:
    result = body
    for entry in reversed(list(binders)):
        if isinstance(entry, tuple):
            name, ty = entry
        else:
            name, ty = entry.name, entry.ty
        result = kind(name, ty, result)
    return result


def head_constant(t: Term) -> str | None:
    """Name of the head constant of an application, if any."""
    head, _ = decompose_app(t)
    return head.name if isinstance(head, Const) else None


def context_names(ctx: Context) -> list[str]:
    return [entry.name for entry in ctx]


def subterms(t: Term) -> Iterable[Term]:
    """Immediate subterms, including local substitution entries."""
    match t:
        case App(head=head, args=args):
            yield head
            yield from args
        case Lambda(ty=ty, body=body) | Prod(ty=ty, body=body):
            yield ty
            yield body
        case LetIn(ty=ty, value=value, body=body):
            yield ty
            yield value
            yield body
        case Match(scrutinee=scrutinee, return_ty=return_ty, branches=branches):
            yield scrutinee
            yield return_ty
            for branch in branches:
                for binder in branch.binders:
                    yield binder.ty
                yield branch.body
        case Meta(local_subst=local_subst):
            yield from local_subst
        case _:
            return


def is_internal(t: Term) -> bool:
    """True iff t contains no Placeholder and no PlaceholderVec."""
    stack = [t]
    while stack:
        current = stack.pop()
        if isinstance(current, (Placeholder, PlaceholderVec)):
            return False
        stack.extend(subterms(current))
    return True


def size(t: Term) -> int:
    """Number of nodes, used for trace summaries and fuzz bounds."""
    total = 0
    stack = [t]
    while stack:
        current = stack.pop()
        total += 1
        stack.extend(subterms(current))
    return total
