"""Parser for refiner scripts.

TIER 4: May import from all tiers.

The grammar is LALR(1) and produces external terms in which every
identifier is still a ``Const``; ``cli.scope`` turns bound names into
de Bruijn indices once the environment is known. Every node carries the
source span it was parsed from.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from functools import cache

import lark as L

from core.errors import ParseError
from core.objects import (
    Axiom,
    Constructor,
    Definition,
    GlobalObject,
    InductiveBlock,
    InductiveType,
    RecBlock,
    RecFunction,
)
from core.terms import (
    App,
    Binder,
    Branch,
    Const,
    Decl,
    Lambda,
    LetIn,
    Match,
    Meta,
    Placeholder,
    PlaceholderVec,
    Prod,
    Sort,
    Span,
    Term,
    mk_app,
)
from core.types import CommandKind
from refine.coercions import WILDCARD, Skeleton

GRAMMAR = r"""
start: command*
term_only: term

?command: axiom | definition | inductive | coinductive | letrec | letcorec
        | coercion | check | universe | constraint | meta_decl

axiom: "axiom" IDENT ":" term "."
definition: "definition" IDENT param* [":" term] ":=" term "."
inductive: "inductive" ind_body ("with" ind_body)* "."
coinductive: "coinductive" ind_body ("with" ind_body)* "."
ind_body: IDENT param* ":" term ":=" ctor*
ctor: "|" IDENT ":" term
letrec: "let" "rec" rec_body ("and" rec_body)* "."
letcorec: "let" "corec" rec_body ("and" rec_body)* "."
rec_body: IDENT param+ [rec_on] ":" term ":=" term
rec_on: "on" IDENT
coercion: "coercion" IDENT INT [priority] [source] [arity] "."
priority: "priority" SIGNED_INT
source: "source" skel+
arity: "arity" INT
check: "check" term [":" term] "."
universe: "universe" IDENT "."
constraint: "constraint" level LEQ level "."
          | "constraint" level LT level "."
meta_decl: "meta" META ":" term "."

?term: "fun" binders "=>" term                     -> lam
     | "forall" binders "," term                   -> pi
     | "let" IDENT [":" term] ":=" term "in" term   -> letin
     | arrow

?arrow: app "->" arrow                             -> arrow
      | app

?app: atom
    | atom arg+                                    -> application

?arg: atom
    | "..."                                        -> vec

?atom: IDENT                                       -> ident
     | "?"                                         -> placeholder
     | META [meta_subst]                           -> meta_var
     | "Prop"                                      -> prop
     | "Type"                                      -> type0
     | TYPE_AT                                     -> type_at
     | "match" term [match_in] [match_return] "with" branch* "end" -> match
     | "(" term ")"

meta_subst: "[" "]"
          | "[" term (";" term)* "]"
match_in: "in" IDENT
match_return: "return" term
branch: "|" IDENT pattern* "=>" term
pattern: IDENT                                     -> pattern_var
       | "(" IDENT+ ":" term ")"                   -> pattern_typed

binders: IDENT+ [":" term]                         -> simple_binders
       | param+                                    -> paren_binders
param: "(" IDENT+ ":" term ")"

level: IDENT ["+" INT]
?skel: IDENT                                       -> skel_name
     | "(" IDENT skel* ")"                         -> skel_app

LEQ: "<="
LT: "<"
META.2: /\?[0-9]+/
TYPE_AT.2: /Type\([A-Za-z0-9_]+(\+[0-9]+)?\)/
IDENT: /[A-Za-z0-9_][A-Za-z0-9_']*/
COMMENT: /\(\*(.|\n)*?\*\)/

%import common.INT
%import common.SIGNED_INT
%import common.WS
%ignore WS
%ignore COMMENT
"""


# Commands


@dataclass(frozen=True)
class Command:
    """One script command; ``line`` is where it starts."""

    kind: CommandKind
    line: int


@dataclass(frozen=True)
class ObjectCommand(Command):
    """axiom, definition, (co)inductive block or let rec/corec block."""

    obj: GlobalObject


@dataclass(frozen=True)
class CoercionCommand(Command):
    name: str
    k: int
    priority: int = 0
    source: Skeleton | None = None
    arity: int | None = None


@dataclass(frozen=True)
class CheckCommand(Command):
    term: Term
    ty: Term | None = None


@dataclass(frozen=True)
class UniverseCommand(Command):
    name: str


@dataclass(frozen=True)
class ConstraintCommand(Command):
    lower: str
    upper: str
    strict: bool = False


@dataclass(frozen=True)
class MetaCommand(Command):
    """``meta ?n : T.`` declares a closed metavariable for later commands."""

    index: int
    ty: Term


Script = tuple[Command, ...]


# Tree -> terms


@dataclass(frozen=True)
class _RecHeader:
    """Parsed ``let rec`` body before the ``on`` name becomes a position."""

    name: str
    params: tuple[tuple[str, Term], ...]
    rec_on: str | None
    return_ty: Term
    body: Term


def _span(meta: L.tree.Meta) -> Span | None:
    if getattr(meta, "empty", True):
        return None
    return Span(meta.line, meta.column, meta.end_line, meta.end_column)


def _token_span(token: L.Token) -> Span:
    return Span(token.line, token.column, token.end_line or token.line, token.end_column or 0)


def _expand_params(groups: Sequence[Sequence[tuple[str, Term]]]) -> list[tuple[str, Term]]:
    return [binder for group in groups for binder in group]


def _wrap(kind: type[Lambda] | type[Prod], binders: Sequence[tuple[str, Term]], body: Term,
          span: Span | None) -> Term:
    for name, ty in reversed(binders):
        body = kind(name, ty, body, span=span)
    return body


@L.v_args(meta=True)
class _ToTerms(L.Transformer):
    """Builds terms and commands bottom-up from the lark tree."""

    # Atoms

    def ident(self, meta, children):
        (token,) = children
        return Const(str(token), span=_token_span(token))

    def placeholder(self, meta, children):
        return Placeholder(span=_span(meta))

    def vec(self, meta, children):
        return PlaceholderVec(span=_span(meta))

    def meta_var(self, meta, children):
        token, local = children
        return Meta(int(token[1:]), tuple(local or ()), span=_span(meta))

    def meta_subst(self, meta, children):
        return list(children)

    def prop(self, meta, children):
        return Sort(None, span=_span(meta))

    def type0(self, meta, children):
        return Sort("0", span=_span(meta))

    def type_at(self, meta, children):
        (token,) = children
        return Sort(str(token)[len("Type(") : -1], span=_token_span(token))

    # Compound terms

    def application(self, meta, children):
        head, *args = children
        app = mk_app(head, args)
        return replace(app, span=_span(meta)) if isinstance(app, App) else app

    def arrow(self, meta, children):
        dom, cod = children
        return Prod("_", dom, cod, span=_span(meta))

    def lam(self, meta, children):
        binders, body = children
        return _wrap(Lambda, binders, body, _span(meta))

    def pi(self, meta, children):
        binders, body = children
        return _wrap(Prod, binders, body, _span(meta))

    def letin(self, meta, children):
        name, ty, value, body = children
        return LetIn(str(name), ty or Placeholder(), value, body, span=_span(meta))

    def simple_binders(self, meta, children):
        *names, ty = children
        return [(str(n), ty or Placeholder()) for n in names]

    def paren_binders(self, meta, children):
        return _expand_params(children)

    def param(self, meta, children):
        *names, ty = children
        return [(str(n), ty) for n in names]

    def match(self, meta, children):
        scrutinee, ind, ret, *branches = children
        return Match(
            scrutinee,
            ind or "",
            ret or Placeholder(span=_span(meta)),
            tuple(branches),
            span=_span(meta),
        )

    def match_in(self, meta, children):
        return str(children[0])

    def match_return(self, meta, children):
        return children[0]

    def branch(self, meta, children):
        constructor, *rest = children
        *patterns, body = rest
        binders = tuple(Binder(name, ty) for group in patterns for name, ty in group)
        return Branch(str(constructor), binders, body)

    def pattern_var(self, meta, children):
        return [(str(children[0]), Placeholder())]

    def pattern_typed(self, meta, children):
        *names, ty = children
        return [(str(n), ty) for n in names]

    # Universes and skeletons

    def level(self, meta, children):
        base, offset = children
        return str(base) if offset is None else f"{base}+{offset}"

    def skel_name(self, meta, children):
        name = str(children[0])
        return WILDCARD if name == WILDCARD.head else Skeleton(name)

    def skel_app(self, meta, children):
        head, *args = children
        return Skeleton(str(head), tuple(args))

    # Commands

    def axiom(self, meta, children):
        name, ty = children
        return ObjectCommand(CommandKind.AXIOM, meta.line, Axiom(str(name), ty))

    def definition(self, meta, children):
        name, *params, ty, body = children
        binders = _expand_params(params)
        ty = _wrap(Prod, binders, ty or Placeholder(), None)
        body = _wrap(Lambda, binders, body, None)
        return ObjectCommand(CommandKind.DEFINITION, meta.line, Definition(str(name), ty, body))

    def ind_body(self, meta, children):
        name, *rest = children
        *params, arity = [c for c in rest if not isinstance(c, Constructor)]
        ctors = tuple(c for c in rest if isinstance(c, Constructor))
        return _expand_params(params), InductiveType(str(name), arity, ctors)

    def ctor(self, meta, children):
        name, ty = children
        return Constructor(str(name), ty)

    def inductive(self, meta, children, coinductive=False):
        params = children[0][0]
        for other, ind in children[1:]:
            if len(other) != len(params) or any(
                a[0] != b[0] for a, b in zip(other, params, strict=True)
            ):
                raise ParseError(
                    f"{ind.name} must declare the same parameters as {children[0][1].name}",
                    meta.line,
                    meta.column,
                )
        context = tuple(Decl(name, ty) for name, ty in params)
        block = InductiveBlock(context, tuple(ind for _, ind in children), coinductive)
        return ObjectCommand(CommandKind.INDUCTIVE, meta.line, block)

    def coinductive(self, meta, children):
        return self.inductive(meta, children, coinductive=True)

    def rec_body(self, meta, children):
        name, *params, rec_on, ret, body = children
        return _RecHeader(str(name), tuple(_expand_params(params)), rec_on, ret, body)

    def rec_on(self, meta, children):
        return str(children[0])

    def letrec(self, meta, children, corecursive=False):
        functions = []
        for header in children:
            names = [n for n, _ in header.params]
            rec_arg = None
            if header.rec_on is not None:
                if header.rec_on not in names:
                    raise ParseError(
                        f"{header.name} has no argument named {header.rec_on}",
                        meta.line,
                        meta.column,
                    )
                rec_arg = len(names) - 1 - names[::-1].index(header.rec_on)
            binders = tuple(Decl(n, ty) for n, ty in header.params)
            functions.append(
                RecFunction(header.name, binders, header.return_ty, header.body, rec_arg)
            )
        return ObjectCommand(CommandKind.LETREC, meta.line, RecBlock(tuple(functions), corecursive))

    def letcorec(self, meta, children):
        return self.letrec(meta, children, corecursive=True)

    def coercion(self, meta, children):
        name, k, priority, source, arity = children
        return CoercionCommand(
            CommandKind.COERCION, meta.line, str(name), int(k), priority or 0, source, arity
        )

    def priority(self, meta, children):
        return int(children[0])

    def source(self, meta, children):
        head, *args = children
        if args:
            return Skeleton(head.head, (*head.children, *args))
        return head

    def arity(self, meta, children):
        return int(children[0])

    def check(self, meta, children):
        term, ty = children
        return CheckCommand(CommandKind.CHECK, meta.line, term, ty)

    def universe(self, meta, children):
        return UniverseCommand(CommandKind.UNIVERSE, meta.line, str(children[0]))

    def constraint(self, meta, children):
        lower, op, upper = children
        return ConstraintCommand(
            CommandKind.CONSTRAINT, meta.line, lower, upper, strict=op.type == "LT"
        )

    def meta_decl(self, meta, children):
        token, ty = children
        return MetaCommand(CommandKind.META, meta.line, int(token[1:]), ty)

    def start(self, meta, children):
        return tuple(children)

    def term_only(self, meta, children):
        return children[0]


@cache
def _parser() -> L.Lark:
    return L.Lark(
        GRAMMAR,
        parser="lalr",
        start=["start", "term_only"],
        propagate_positions=True,
        maybe_placeholders=True,
    )


def _parse(source: str, start: str):
    try:
        return _ToTerms().transform(_parser().parse(source, start=start))
    except L.exceptions.UnexpectedInput as e:
        line = e.line if isinstance(e.line, int) and e.line > 0 else 0
        column = e.column if isinstance(e.column, int) and e.column > 0 else 0
        raise ParseError(_describe(e), line, column) from None
    except L.exceptions.VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        raise


def _describe(e: L.exceptions.UnexpectedInput) -> str:
    if isinstance(e, L.exceptions.UnexpectedToken):
        if e.token.type == "$END":
            return "unexpected end of input"
        return f"unexpected '{e.token}'"
    if isinstance(e, L.exceptions.UnexpectedCharacters):
        return f"unexpected character '{e.char}'"
    return "syntax error"


def parse(source: str) -> Script:
    """Parse a whole script.

    Raises:
        ParseError: With the line and column of the first syntax error.
    """
    return _parse(source, "start")


def parse_term(source: str) -> Term:
    """Parse a single external term (identifiers unresolved)."""
    return _parse(source, "term_only")


__all__ = [
    "GRAMMAR",
    "CheckCommand",
    "CoercionCommand",
    "Command",
    "ConstraintCommand",
    "MetaCommand",
    "ObjectCommand",
    "Script",
    "UniverseCommand",
    "parse",
    "parse_term",
]
