"""Weak-head reduction.

TIER 2: May import from core and lib.

The reducer is a head/stack machine over internal terms. Rules:

- β: ``(λx:T.t) u`` → ``t[x/u]``
- ζ: ``let x := v in t`` → ``t[x/v]``
- δ: global definitions; local definitions of the context
- δ-meta: assigned metavariables, instantiating their local substitution
- ι: match on a constructor-headed scrutinee
- μ: fixpoint applied up to a constructor-headed recursive argument
- ν: cofixpoint in match scrutinee position

Open metavariables are normal. Every ``whd`` call has a fuel budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from core.debruijn import instantiate, lift
from core.errors import FuelExhausted
from core.metas import EMPTY_SUBST, Substitution
from core.terms import (
    App,
    Binder,
    Branch,
    Const,
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
    decompose_app,
    mk_app,
)
from core.types import Role
from lib import config

if TYPE_CHECKING:
    from kernel.environment import GlobalEnv


@dataclass
class Reducer:
    """Weak-head reduction in a fixed environment and substitution."""

    env: GlobalEnv
    subst: Substitution = EMPTY_SUBST
    fuel: int = 0

    def __post_init__(self) -> None:
        if not self.fuel:
            self.fuel = int(config.get("kernel.fuel", 1_000_000))
        self._steps = 0
        self._depth = 0

    def whd(self, ctx: Context, t: Term, delta: bool = True) -> Term:
        """Weak-head normal form of t in ctx.

        With ``delta=False`` global definitions are not unfolded; every other
        rule still fires.

        Raises:
            FuelExhausted: When the step budget is exceeded.
        """
        if self._depth == 0:
            self._steps = 0
        self._depth += 1
        try:
            return self._whd(ctx, t, delta)
        finally:
            self._depth -= 1

    def _tick(self) -> None:
        self._steps += 1
        if self._steps > self.fuel:
            raise FuelExhausted("whd", self.fuel)

    def _whd(self, ctx: Context, t: Term, delta: bool) -> Term:
        head = t
        stack: list[Term] = []
        while True:
            self._tick()
            match head:
                case App(head=h, args=args):
                    stack[:0] = args
                    head = h
                case Lambda(body=body) if stack:
                    head = instantiate(body, [stack.pop(0)])
                case LetIn(value=value, body=body):
                    head = instantiate(body, [value])
                case Rel(index=i) if i < len(ctx) and isinstance(ctx[-1 - i], Def):
                    head = lift(ctx[-1 - i].value, i + 1)
                case Meta(index=j, local_subst=local_subst) if j in self.subst:
                    head = instantiate(self.subst[j].body, local_subst)
                case Const(name=name) if delta and self._is_definition(name):
                    head = self.env.definition_body(name)
                case Const(name=name) if stack and self._fix_ready(ctx, name, stack, delta):
                    head = self.env.fixpoint(name).body
                case Match() as m:
                    reduced, scrutinee = self._reduce_match(ctx, m, delta)
                    if reduced is None:
                        head = Match(scrutinee, m.ind, m.return_ty, m.branches, span=m.span)
                        break
                    head = reduced
                case _:
                    break
        return mk_app(head, stack)

    def _is_definition(self, name: str) -> bool:
        return name in self.env and self.env.role(name) == Role.DEFINITION

    def _fix_ready(self, ctx: Context, name: str, stack: list[Term], delta: bool) -> bool:
        """μ: unfold when the recursive argument reduces to a constructor."""
        if not self.env.is_fixpoint(name):
            return False
        info = self.env.fixpoint(name)
        if info.corecursive or info.body is None or info.rec_arg is None:
            return False
        if len(stack) <= info.rec_arg:
            return False
        arg = self._whd(ctx, stack[info.rec_arg], delta)
        if not self._constructor_headed(arg):
            return False
        stack[info.rec_arg] = arg
        return True

    def _constructor_headed(self, t: Term) -> bool:
        head, _ = decompose_app(t)
        return isinstance(head, Const) and self.env.is_constructor(head.name)

    def _reduce_match(
        self, ctx: Context, m: Match, delta: bool
    ) -> tuple[Term | None, Term]:
        """Try ι or ν; also returns the reduced scrutinee."""
        scrutinee = self._whd(ctx, m.scrutinee, delta)
        head, args = decompose_app(scrutinee)
        if not isinstance(head, Const):
            return None, scrutinee
        if self.env.is_constructor(head.name):
            # ι
            info = self.env.constructor(head.name)
            nparams = self.env.inductive(info.inductive).homogeneous_arity
            if info.index >= len(m.branches):
                return None, scrutinee
            branch = m.branches[info.index]
            values = args[nparams:]
            if len(values) != len(branch.binders):
                return None, scrutinee
            return instantiate(branch.body, values), scrutinee
        if self.env.is_fixpoint(head.name):
            # ν
            info = self.env.fixpoint(head.name)
            if info.corecursive and info.body is not None:
                unfolded = mk_app(info.body, args)
                return Match(unfolded, m.ind, m.return_ty, m.branches, span=m.span), scrutinee
        return None, scrutinee

    def whd_prods(
        self, ctx: Context, t: Term, n: int | None = None
    ) -> tuple[list[Decl], Term]:
        """Peel up to n products (all when n is None), whd-ing at each step.

        Returns the peeled telescope and the residual. When fewer than n
        products were found the residual is in weak-head normal form.
        """
        telescope: list[Decl] = []
        local = tuple(ctx)
        while n is None or len(telescope) < n:
            w = self.whd(local, t)
            if not isinstance(w, Prod):
                return telescope, w
            decl = Decl(w.name, w.ty)
            telescope.append(decl)
            local = (*local, decl)
            t = w.body
        return telescope, t

    def normalize(self, ctx: Context, t: Term) -> Term:
        """Full normal form; used by tests as a comparison oracle."""
        w = self.whd(ctx, t)
        head, args = decompose_app(w)
        norm_args = [self.normalize(ctx, a) for a in args]
        match head:
            case Lambda(name=name, ty=ty, body=body):
                ty_n = self.normalize(ctx, ty)
                head = Lambda(name, ty_n, self.normalize((*ctx, Decl(name, ty_n)), body))
            case Prod(name=name, ty=ty, body=body):
                ty_n = self.normalize(ctx, ty)
                head = Prod(name, ty_n, self.normalize((*ctx, Decl(name, ty_n)), body))
            case Meta(index=index, local_subst=local_subst):
                head = Meta(index, tuple(self.normalize(ctx, a) for a in local_subst))
            case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
                new_branches = []
                for b in branches:
                    local = tuple(ctx)
                    binders = []
                    for x in b.binders:
                        ty_n = self.normalize(local, x.ty)
                        binders.append(Binder(x.name, ty_n))
                        local = (*local, Decl(x.name, ty_n))
                    new_branches.append(
                        Branch(b.constructor, tuple(binders), self.normalize(local, b.body))
                    )
                head = Match(
                    self.normalize(ctx, scrutinee),
                    ind,
                    self.normalize(ctx, return_ty),
                    tuple(new_branches),
                )
        return mk_app(head, norm_args)


def beta_head(t: Term, count: int) -> Term:
    """Fire at most ``count`` β-redexes at the head of t."""
    head, spine = decompose_app(t)
    args = list(spine)
    while count > 0 and args and isinstance(head, Lambda):
        head = instantiate(head.body, [args.pop(0)])
        count -= 1
        head, inner = decompose_app(head)
        args[:0] = inner
    return mk_app(head, args)


def whd(
    env: GlobalEnv, problem: object, subst: Substitution, ctx: Context, t: Term
) -> Term:
    """Weak-head normal form of t in (E, P, S, Γ); P is not consulted."""
    return Reducer(env, subst).whd(ctx, t)


def whd_prods(
    env: GlobalEnv,
    problem: object,
    subst: Substitution,
    ctx: Context,
    t: Term,
    n: int | None = None,
) -> tuple[list[Decl], Term]:
    """Peel up to n products of t in (E, P, S, Γ)."""
    return Reducer(env, subst).whd_prods(ctx, t, n)
