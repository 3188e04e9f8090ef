"""Proof problems, metavariable substitutions and their operations.

TIER 0: May import from core and the Python stdlib only.

A proof problem P maps each open metavariable to its context and type; a
substitution S maps each assigned metavariable to its context, body and type.
Both are immutable mappings: every update returns a new value.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from core.debruijn import instantiate
from core.errors import UndeclaredMetaError
from core.terms import (
    App,
    Binder,
    Branch,
    Context,
    Decl,
    Def,
    Lambda,
    LetIn,
    Match,
    Meta,
    Prod,
    Rel,
    Term,
    subterms,
)


@dataclass(frozen=True)
class MetaDecl:
    """``Γ ⊢ ?n : T``. Sort-flagged metas may only be instantiated by sorts."""

    context: Context
    ty: Term
    is_sort: bool = False


@dataclass(frozen=True)
class MetaDef:
    """``Γ ⊢ ?n := body : T``."""

    context: Context
    body: Term
    ty: Term
    is_sort: bool = False


class _Store(Mapping[int, "MetaDecl | MetaDef"]):
    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping | None = None):
        self._entries = dict(entries or {})

    def __getitem__(self, index: int):
        return self._entries[index]

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({sorted(self._entries)})"


class ProofProblem(_Store):
    """Open metavariable declarations."""

    def __getitem__(self, index: int) -> MetaDecl:
        return self._entries[index]

    def with_decl(self, index: int, decl: MetaDecl) -> ProofProblem:
        entries = dict(self._entries)
        entries[index] = decl
        return ProofProblem(entries)

    def without(self, index: int) -> ProofProblem:
        entries = dict(self._entries)
        entries.pop(index, None)
        return ProofProblem(entries)


class Substitution(_Store):
    """Metavariable assignments."""

    def __getitem__(self, index: int) -> MetaDef:
        return self._entries[index]

    def with_assignment(self, index: int, assignment: MetaDef) -> Substitution:
        entries = dict(self._entries)
        entries[index] = assignment
        return Substitution(entries)


EMPTY_PROBLEM = ProofProblem()
EMPTY_SUBST = Substitution()


def identity_subst(ctx: Context) -> tuple[Term, ...]:
    """Local substitution mapping every entry of ctx to itself."""
    n = len(ctx)
    return tuple(Rel(n - 1 - i, entry.name) for i, entry in enumerate(ctx))


def apply_subst(
    s: Substitution, t: Term, problem: ProofProblem | None = None
) -> Term:
    """Replace every assigned metavariable of t by its instantiated body.

    Assigned bodies are themselves expanded, so the result mentions only open
    metavariables.

    Raises:
        UndeclaredMetaError: When ``problem`` is given and a metavariable is
            declared in neither ``problem`` nor ``s``.
    """
    if not s and problem is None:
        return t
    return _apply(s, t, problem, {})


def _apply(s: Substitution, t: Term, problem: ProofProblem | None, cache: dict) -> Term:
    match t:
        case Meta(index=index, local_subst=local_subst):
            args = tuple(_apply(s, a, problem, cache) for a in local_subst)
            if index in s:
                if index not in cache:
                    cache[index] = _apply(s, s[index].body, problem, cache)
                return instantiate(cache[index], args)
            if problem is not None and index not in problem:
                raise UndeclaredMetaError(index)
            return Meta(index, args, span=t.span)
    return _rebuild(t, lambda sub: _apply(s, sub, problem, cache))


def _rebuild(t: Term, fn) -> Term:
    match t:
        case App(head=head, args=args):
            return App(fn(head), tuple(fn(a) for a in args), span=t.span)
        case Lambda(name=name, ty=ty, body=body):
            return Lambda(name, fn(ty), fn(body), span=t.span)
        case Prod(name=name, ty=ty, body=body):
            return Prod(name, fn(ty), fn(body), span=t.span)
        case LetIn(name=name, ty=ty, value=value, body=body):
            return LetIn(name, fn(ty), fn(value), fn(body), span=t.span)
        case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
            return Match(
                fn(scrutinee),
                ind,
                fn(return_ty),
                tuple(
                    Branch(
                        b.constructor,
                        tuple(Binder(x.name, fn(x.ty)) for x in b.binders),
                        fn(b.body),
                    )
                    for b in branches
                ),
                span=t.span,
            )
    return t


def apply_subst_context(s: Substitution, ctx: Context) -> Context:
    """apply_subst on every entry of a context."""
    if not s:
        return ctx
    result: list = []
    for entry in ctx:
        if isinstance(entry, Def):
            result.append(Def(entry.name, apply_subst(s, entry.value), apply_subst(s, entry.ty)))
        else:
            result.append(Decl(entry.name, apply_subst(s, entry.ty)))
    return tuple(result)


def metas_of(obj: Term | Context) -> frozenset[int]:
    """Indices of the metavariables occurring in a term or a context."""
    roots: Iterable[Term]
    if isinstance(obj, tuple):
        roots = [
            part
            for entry in obj
            for part in ((entry.value, entry.ty) if isinstance(entry, Def) else (entry.ty,))
        ]
    else:
        roots = [obj]
    found: set[int] = set()
    stack = list(roots)
    while stack:
        current = stack.pop()
        if isinstance(current, Meta):
            found.add(current.index)
        stack.extend(subterms(current))
    return frozenset(found)


def meta_dependencies(
    problem: ProofProblem, s: Substitution | None = None
) -> dict[int, frozenset[int]]:
    """Direct dependency edges of ≪: n -> metas occurring in Γ_n or T_n.

    With ``s`` given, assigned metavariables are expanded first, so edges
    only point to open metavariables.
    """
    deps: dict[int, frozenset[int]] = {}
    for index, decl in problem.items():
        if s:
            found = metas_of(apply_subst_context(s, decl.context)) | metas_of(
                apply_subst(s, decl.ty)
            )
        else:
            found = metas_of(decl.context) | metas_of(decl.ty)
        deps[index] = frozenset(m for m in found if m in problem)
    return deps


def check_valid_proof_problem(problem: ProofProblem, s: Substitution | None = None) -> bool:
    """True iff the metavariable dependency order is irreflexive (acyclic)."""
    deps = meta_dependencies(problem, s)
    state: dict[int, int] = {}  # 1 = on stack, 2 = done

    for root in deps:
        if state.get(root):
            continue
        stack: list[tuple[int, Iterator[int]]] = [(root, iter(deps[root]))]
        state[root] = 1
        while stack:
            node, edges = stack[-1]
            advanced = False
            for nxt in edges:
                mark = state.get(nxt)
                if mark == 1:
                    return False
                if mark is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(deps[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
    return True


def depends_on(problem: ProofProblem, s: Substitution, start: int, target: int) -> bool:
    """True iff ``target ≪* start`` through P (expanded through S)."""
    seen: set[int] = set()
    stack = [start]
    while stack:
        node = stack.pop()
        if node == target:
            return True
        if node in seen:
            continue
        seen.add(node)
        if node in problem:
            decl = problem[node]
            stack.extend(
                metas_of(apply_subst_context(s, decl.context)) | metas_of(apply_subst(s, decl.ty))
            )
    return False
