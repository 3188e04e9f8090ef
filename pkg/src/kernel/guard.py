"""Guard conditions for recursive and corecursive blocks.

TIER 2: May import from core and lib.

Recursion must be structural: each call to a function of the block passes,
at that function's recursive position, a variable obtained by matching on
the caller's recursive argument (or on something already smaller). Pattern
variables whose type is in the scrutinee's inductive family are smaller, and
so are applications of smaller variables.

Corecursion must be productive: each call to a function of the block sits
directly under a constructor of a coinductive type.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from core.errors import GuardError
from core.objects import RecBlock
from core.terms import (
    App,
    Const,
    Lambda,
    LetIn,
    Match,
    Meta,
    Prod,
    Rel,
    Sort,
    Term,
    decompose_app,
    subterms,
)
from kernel.environment import GlobalEnv
from kernel.inductives import mentions


def _conclusion_head(ty: Term) -> str | None:
    while isinstance(ty, Prod):
        ty = ty.body
    return _head_name(ty)


def _head_name(ty: Term) -> str | None:
    head, _ = decompose_app(ty)
    return head.name if isinstance(head, Const) else None


@dataclass
class _FixGuard:
    """Structural check of one fixpoint body."""

    env: GlobalEnv
    rec_args: dict[str, int]

    def check(self, body: Term, arity: int, rec_arg: int) -> None:
        self._walk(body, arity, frozenset(), frozenset({rec_arg}))

    def _level(self, rel: Rel, depth: int) -> int:
        return depth - 1 - rel.index

    def _smaller(self, t: Term, depth: int, smaller: frozenset[int]) -> bool:
        head, _ = decompose_app(t)
        return isinstance(head, Rel) and self._level(head, depth) in smaller

    def _walk(
        self, t: Term, depth: int, smaller: frozenset[int], roots: frozenset[int]
    ) -> None:
        match t:
            case Const(name=name) if name in self.rec_args:
                raise GuardError(f"{name} must be applied up to its recursive argument")
            case App(head=Const(name=name), args=args) if name in self.rec_args:
                position = self.rec_args[name]
                if len(args) <= position:
                    raise GuardError(f"{name} must be applied up to its recursive argument")
                if not self._smaller(args[position], depth, smaller):
                    raise GuardError(
                        f"recursive call to {name} on a term that is not structurally smaller"
                    )
                for a in args:
                    self._walk(a, depth, smaller, roots)
            case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
                self._walk(scrutinee, depth, smaller, roots)
                self._walk(return_ty, depth, smaller, roots)
                decreasing = (
                    isinstance(scrutinee, Rel)
                    and self._level(scrutinee, depth) in roots | smaller
                )
                family = self.env.inductive(ind).family if decreasing else ()
                for branch in branches:
                    local = depth
                    inner = smaller
                    for binder in branch.binders:
                        self._walk(binder.ty, local, inner, roots)
                        if _conclusion_head(binder.ty) in family:
                            inner = inner | {local}
                        local += 1
                    self._walk(branch.body, local, inner, roots)
            case Lambda(ty=ty, body=body) | Prod(ty=ty, body=body):
                self._walk(ty, depth, smaller, roots)
                self._walk(body, depth + 1, smaller, roots)
            case LetIn(ty=ty, value=value, body=body):
                self._walk(ty, depth, smaller, roots)
                self._walk(value, depth, smaller, roots)
                self._walk(body, depth + 1, smaller, roots)
            case _:
                for sub in subterms(t):
                    self._walk(sub, depth, smaller, roots)


def check_fix_guard(env: GlobalEnv, block: RecBlock, rec_args: Sequence[int]) -> None:
    """Check a recursive block for the given recursive positions.

    Raises:
        GuardError: On the first unguarded call.
    """
    positions = dict(zip(block.names, rec_args, strict=True))
    for f, position in zip(block.functions, rec_args, strict=True):
        head = _head_name(f.binders[position].ty)
        if head is None or not env.is_inductive(head):
            raise GuardError(f"recursive argument of {f.name} is not of an inductive type")
        _FixGuard(env, positions).check(f.body, len(f.binders), position)


def rec_arg_candidates(env: GlobalEnv, block: RecBlock) -> list[list[int]]:
    """Per function, the argument positions whose type is an inductive type."""
    result = []
    for f in block.functions:
        positions = []
        for i, decl in enumerate(f.binders):
            head = _head_name(decl.ty)
            if head is not None and env.is_inductive(head) and not env.inductive(head).coinductive:
                positions.append(i)
        result.append(positions)
    return result


def check_cofix_guard(env: GlobalEnv, block: RecBlock) -> None:
    """Check that every corecursive call is guarded by a constructor.

    Raises:
        GuardError: On the first unguarded call.
    """
    names = frozenset(block.names)
    for f in block.functions:
        _CofixGuard(env, names).walk(f.body, guarded=False)


@dataclass
class _CofixGuard:
    env: GlobalEnv
    names: frozenset[str]

    def _forbid(self, t: Term) -> None:
        if mentions(t, self.names):
            raise GuardError("corecursive call is not guarded by a constructor")

    def walk(self, t: Term, guarded: bool) -> None:
        head, args = decompose_app(t)
        match head:
            case Const(name=name) if name in self.names:
                if not guarded:
                    raise GuardError(f"call to {name} is not guarded by a constructor")
                for a in args:
                    self._forbid(a)
            case Const(name=name) if self.env.is_constructor(name):
                info = self.env.constructor(name)
                ind = self.env.inductive(info.inductive)
                nparams = ind.homogeneous_arity
                for a in args[:nparams]:
                    self._forbid(a)
                for a in args[nparams:]:
                    self.walk(a, guarded or ind.coinductive)
            case Match(scrutinee=scrutinee, return_ty=return_ty, branches=branches) if not args:
                self._forbid(scrutinee)
                self._forbid(return_ty)
                for branch in branches:
                    for binder in branch.binders:
                        self._forbid(binder.ty)
                    self.walk(branch.body, guarded)
            case LetIn(ty=ty, value=value, body=body) if not args:
                self._forbid(ty)
                self._forbid(value)
                self.walk(body, guarded)
            case Lambda(ty=ty, body=body) if not args:
                self._forbid(ty)
                self.walk(body, guarded)
            case Rel() | Sort() | Meta() | Const():
                for a in args:
                    self._forbid(a)
                if isinstance(head, Meta):
                    self._forbid(head)
            case _:
                self._forbid(t)
