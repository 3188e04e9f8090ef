"""Conversion ``t1 ↓ t2`` (cumulative) and ``t1 ↓= t2`` (exact).

TIER 2: May import from core and lib.

The check first compares alpha-equal terms, then weak-head forms without
unfolding global definitions, and only then fully reduced weak-head forms.
Direction matters in cumulative mode: ``convert(a, b)`` asks ``a ≤ b``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.metas import EMPTY_PROBLEM, EMPTY_SUBST, ProofProblem, Substitution
from core.terms import (
    App,
    Const,
    Context,
    Decl,
    Lambda,
    Match,
    Meta,
    Prod,
    Rel,
    Sort,
    Term,
)
from core.types import TOP_UNIVERSE, ConvMode
from kernel.reduction import Reducer

if TYPE_CHECKING:
    from kernel.environment import GlobalEnv


class Converter:
    """Conversion in a fixed (E, P, S)."""

    def __init__(
        self,
        env: GlobalEnv,
        problem: ProofProblem = EMPTY_PROBLEM,
        subst: Substitution = EMPTY_SUBST,
        reducer: Reducer | None = None,
    ):
        self.env = env
        self.problem = problem
        self.subst = subst
        self.reducer = reducer or Reducer(env, subst)

    def convert(
        self, ctx: Context, t1: Term, t2: Term, mode: ConvMode = ConvMode.CUMULATIVE
    ) -> bool:
        if t1 == t2:
            return True
        a = self.reducer.whd(ctx, t1, delta=False)
        b = self.reducer.whd(ctx, t2, delta=False)
        if self._compare(ctx, a, b, mode):
            return True
        a2 = self.reducer.whd(ctx, a)
        b2 = self.reducer.whd(ctx, b)
        if a2 == a and b2 == b:
            return False
        return self._compare(ctx, a2, b2, mode)

    def sort_leq(self, s1: Sort, s2: Sort, mode: ConvMode) -> bool:
        if s1.is_prop or s2.is_prop:
            if s1.is_prop and s2.is_prop:
                return True
            return s1.is_prop and not mode.is_exact()
        u, v = s1.universe, s2.universe
        universes = self.env.universes
        if mode.is_exact():
            return universes.leq(u, v) and universes.leq(v, u)
        return universes.leq(u, v)

    def is_sort_meta(self, t: Term) -> bool:
        return isinstance(t, Meta) and t.index in self.problem and self.problem[t.index].is_sort

    def _compare(self, ctx: Context, a: Term, b: Term, mode: ConvMode) -> bool:
        if a == b:
            return True
        match a, b:
            case Sort(), Sort():
                return self.sort_leq(a, b, mode)
            case Meta(), Sort(universe=u) if self.is_sort_meta(a):
                return u == TOP_UNIVERSE and not mode.is_exact()
            case Prod(), Prod():
                return self.convert(ctx, a.ty, b.ty, ConvMode.EXACT) and self.convert(
                    (*ctx, Decl(a.name, a.ty)), a.body, b.body, mode
                )
            case Lambda(), Lambda():
                return self.convert((*ctx, Decl(a.name, a.ty)), a.body, b.body, mode)
            case App(), App():
                if len(a.args) != len(b.args):
                    return False
                if not self.convert(ctx, a.head, b.head, ConvMode.EXACT):
                    return False
                return all(
                    self.convert(ctx, x, y, ConvMode.EXACT)
                    for x, y in zip(a.args, b.args, strict=True)
                )
            case Match(), Match():
                return self._compare_match(ctx, a, b, mode)
            case Meta(), Meta():
                return (
                    a.index == b.index
                    and len(a.local_subst) == len(b.local_subst)
                    and all(
                        self.convert(ctx, x, y, ConvMode.EXACT)
                        for x, y in zip(a.local_subst, b.local_subst, strict=True)
                    )
                )
            case (Rel(), Rel()) | (Const(), Const()):
                return a == b
        return False

    def _compare_match(self, ctx: Context, a: Match, b: Match, mode: ConvMode) -> bool:
        if a.ind != b.ind or len(a.branches) != len(b.branches):
            return False
        if not self.convert(ctx, a.scrutinee, b.scrutinee, mode):
            return False
        if not self.convert(ctx, a.return_ty, b.return_ty, mode):
            return False
        for x, y in zip(a.branches, b.branches, strict=True):
            if x.constructor != y.constructor or len(x.binders) != len(y.binders):
                return False
            local = (*ctx, *(Decl(v.name, v.ty) for v in x.binders))
            if not self.convert(local, x.body, y.body, mode):
                return False
        return True


def convert(
    env: GlobalEnv,
    problem: ProofProblem,
    subst: Substitution,
    ctx: Context,
    t1: Term,
    t2: Term,
    mode: ConvMode = ConvMode.CUMULATIVE,
) -> bool:
    """Decide ``t1 ↓ t2`` (or ``↓=`` in exact mode) in (E, P, S, Γ)."""
    return Converter(env, problem, subst).convert(ctx, t1, t2, mode)
