"""Greedy unification of terms with metavariables.

TIER 3: May import from core, lib and kernel.

``unify`` returns a refined state under which the two terms are convertible
(cumulatively or exactly) or raises UnificationError. It never backtracks
across steps; failure is allowed even when a unifier exists.

Steps, in order:

1. alpha-equal terms unify at once
2. both sides go to weak-head normal form without unfolding constants
3. a flexible side (open metavariable, possibly applied) is instantiated:
   by inverting its local substitution, preferring projections; as a
   Miller pattern when applied to distinct variables; by peeling a suffix
   of arguments otherwise; failing that, by abstracting the occurrences of
   its arguments in the other side
4. rigid sides are compared structurally, arguments in exact mode
5. both sides are fully reduced and the comparison retried
"""

from __future__ import annotations

from dataclasses import dataclass

from core.debruijn import abstract, free_rels, instantiate, lift, map_rels
from core.errors import KernelError, UnificationError
from core.metas import depends_on, metas_of
from core.pretty import pretty
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
    Sort,
    Term,
    context_names,
    decompose_app,
    mk_app,
    mk_lambdas,
)
from core.types import TOP_UNIVERSE, ConvMode
from kernel.conversion import Converter
from kernel.environment import GlobalEnv
from kernel.reduction import Reducer
from lib.logger import get_logger
from refine.state import RefinerState

logger = get_logger("unify")


class _NoDelift(Exception):
    pass


@dataclass
class Unifier:
    """Unification in a fixed global environment."""

    env: GlobalEnv

    def unify(
        self,
        st: RefinerState,
        ctx: Context,
        t1: Term,
        t2: Term,
        mode: ConvMode = ConvMode.CUMULATIVE,
    ) -> RefinerState:
        """Return ``st' ≤ st`` under which ``t1 ↓ t2`` (``↓=`` in exact mode).

        Raises:
            UnificationError: Carries both terms with S applied.
        """
        result = self._unify(st, ctx, t1, t2, mode)
        if result is not None:
            converter = Converter(self.env, result.problem, result.subst)
            if converter.convert(ctx, result.instantiate(t1), result.instantiate(t2), mode):
                return result
            logger.debug("unifier result rejected by conversion")
        left, right = st.instantiate(t1), st.instantiate(t2)
        names = context_names(ctx)
        raise UnificationError(
            f"cannot unify {pretty(left, names)} with {pretty(right, names)}",
            rule="unify",
            expected=right,
            inferred=left,
        )

    def try_unify(
        self,
        st: RefinerState,
        ctx: Context,
        t1: Term,
        t2: Term,
        mode: ConvMode = ConvMode.CUMULATIVE,
    ) -> RefinerState | None:
        """unify, returning None on failure."""
        try:
            return self.unify(st, ctx, t1, t2, mode)
        except UnificationError:
            return None

    # Driver

    def _flexible(self, st: RefinerState, t: Term) -> bool:
        head, _ = decompose_app(t)
        return isinstance(head, Meta) and st.is_open(head.index)

    def _unify(
        self, st: RefinerState, ctx: Context, a: Term, b: Term, mode: ConvMode
    ) -> RefinerState | None:
        if a == b:
            return st
        reducer = Reducer(self.env, st.subst)
        a1 = reducer.whd(ctx, a, delta=False)
        b1 = reducer.whd(ctx, b, delta=False)
        if a1 == b1:
            return st
        flex_a, flex_b = self._flexible(st, a1), self._flexible(st, b1)
        if flex_a or flex_b:
            result = self._flex(st, ctx, a1, b1, mode, flex_a, flex_b)
        else:
            result = self._rigid(st, ctx, a1, b1, mode)
        if result is not None:
            return result
        a2 = reducer.whd(ctx, a1)
        b2 = reducer.whd(ctx, b1)
        if a2 != a1 or b2 != b1:
            return self._unify(st, ctx, a2, b2, mode)
        return None

    # Rigid-rigid

    def _rigid(
        self, st: RefinerState, ctx: Context, a: Term, b: Term, mode: ConvMode
    ) -> RefinerState | None:
        match a, b:
            case Sort(), Sort():
                converter = Converter(self.env, st.problem, st.subst)
                return st if converter.sort_leq(a, b, mode) else None
            case Prod(), Prod():
                st1 = self._unify(st, ctx, a.ty, b.ty, ConvMode.EXACT)
                if st1 is None:
                    return None
                return self._unify(st1, (*ctx, Decl(a.name, a.ty)), a.body, b.body, mode)
            case Lambda(), Lambda():
                st1 = self._unify(st, ctx, a.ty, b.ty, ConvMode.EXACT) or st
                return self._unify(st1, (*ctx, Decl(a.name, a.ty)), a.body, b.body, mode)
            case App(), App():
                if len(a.args) != len(b.args):
                    return None
                current = self._unify(st, ctx, a.head, b.head, ConvMode.EXACT)
                for x, y in zip(a.args, b.args, strict=True):
                    if current is None:
                        return None
                    current = self._unify(current, ctx, x, y, ConvMode.EXACT)
                return current
            case Match(), Match():
                return self._unify_match(st, ctx, a, b, mode)
            case (Rel(), Rel()) | (Const(), Const()):
                return st if a == b else None
        return None

    def _unify_match(
        self, st: RefinerState, ctx: Context, a: Match, b: Match, mode: ConvMode
    ) -> RefinerState | None:
        if a.ind != b.ind or len(a.branches) != len(b.branches):
            return None
        current = self._unify(st, ctx, a.scrutinee, b.scrutinee, mode)
        if current is not None:
            current = self._unify(current, ctx, a.return_ty, b.return_ty, mode)
        for x, y in zip(a.branches, b.branches, strict=True):
            if current is None:
                return None
            if x.constructor != y.constructor or len(x.binders) != len(y.binders):
                return None
            local = tuple(ctx)
            for bx, by in zip(x.binders, y.binders, strict=True):
                if current is None:
                    return None
                current = self._unify(current, local, bx.ty, by.ty, ConvMode.EXACT)
                local = (*local, Decl(bx.name, bx.ty))
            if current is not None:
                current = self._unify(current, local, x.body, y.body, mode)
        return current

    # Flexible cases

    def _flex(
        self,
        st: RefinerState,
        ctx: Context,
        a: Term,
        b: Term,
        mode: ConvMode,
        flex_a: bool,
        flex_b: bool,
    ) -> RefinerState | None:
        ha, args_a = decompose_app(a)
        hb, args_b = decompose_app(b)

        # A sort metavariable is already below Type(top)
        if (
            flex_a
            and not args_a
            and st.is_sort_meta(ha.index)
            and not mode.is_exact()
            and b == Sort(TOP_UNIVERSE)
        ):
            return st

        if flex_a and flex_b and ha.index == hb.index and len(args_a) == len(args_b):
            result = self._pointwise(
                st, ctx, (*ha.local_subst, *args_a), (*hb.local_subst, *args_b)
            )
            if result is not None:
                return result

        if flex_a and flex_b and not args_a and not args_b:
            for meta, other in self._flex_flex_order(st, ha, hb):
                result = self._instantiate(st, ctx, meta, other)
                if result is not None:
                    return result
            return None

        attempts: list[tuple[Term, tuple[Term, ...], Term]] = []
        if flex_a:
            attempts.append((ha, args_a, b))
        if flex_b:
            attempts.append((hb, args_b, a))
        for meta, args, other in attempts:
            if not args:
                result = self._instantiate(st, ctx, meta, other)
            else:
                result = self._pattern(st, ctx, meta, args, other)
            if result is not None:
                return result
        for meta, args, other in attempts:
            if args:
                result = self._peel(st, ctx, meta, args, other, mode)
                if result is not None:
                    return result
        for meta, args, other in attempts:
            if args:
                result = self._abstract_args(st, ctx, meta, args, other)
                if result is not None:
                    return result
        return None

    def _flex_flex_order(
        self, st: RefinerState, m1: Meta, m2: Meta
    ) -> list[tuple[Meta, Meta]]:
        """Which of two distinct open metavariables to instantiate first.

        The one depending on the other goes first; otherwise the younger one,
        so metavariables already present in the input survive. Between two
        sort metavariables the older goes, leaving the one declared in the
        larger context.
        """
        if depends_on(st.problem, st.subst, m2.index, m1.index):
            return [(m2, m1), (m1, m2)]
        if depends_on(st.problem, st.subst, m1.index, m2.index):
            return [(m1, m2), (m2, m1)]
        if st.is_sort_meta(m1.index) and st.is_sort_meta(m2.index):
            older, younger = sorted((m1, m2), key=lambda m: m.index)
            return [(older, younger), (younger, older)]
        if m1.index > m2.index:
            return [(m1, m2), (m2, m1)]
        return [(m2, m1), (m1, m2)]

    def _pointwise(
        self, st: RefinerState, ctx: Context, xs: tuple[Term, ...], ys: tuple[Term, ...]
    ) -> RefinerState | None:
        current: RefinerState | None = st
        for x, y in zip(xs, ys, strict=True):
            if current is None:
                return None
            current = self._unify(current, ctx, x, y, ConvMode.EXACT)
        return current

    def _pattern(
        self,
        st: RefinerState,
        ctx: Context,
        meta: Meta,
        args: tuple[Term, ...],
        other: Term,
    ) -> RefinerState | None:
        """Miller pattern ``?j[σ] x1 ... xn ≡ t`` with distinct variables x⃗."""
        if not all(isinstance(x, Rel) for x in args):
            return None
        indices = [x.index for x in args]
        if len(set(indices)) != len(indices):
            return None
        decl = st.problem[meta.index]
        meta_ty = instantiate(decl.ty, meta.local_subst)
        reducer = Reducer(self.env, st.subst)
        telescope, _ = reducer.whd_prods(ctx, meta_ty, len(args))
        if len(telescope) != len(args):
            return None
        n = len(args)

        def on_rel(rel: Rel, depth: int) -> Term:
            free = rel.index - depth - n
            if free in indices:
                return Rel(depth + n - 1 - indices.index(free), rel.name)
            return rel

        body = map_rels(lift(st.instantiate(other), n), on_rel)
        return self._instantiate(st, ctx, meta, mk_lambdas(telescope, body))

    def _peel(
        self,
        st: RefinerState,
        ctx: Context,
        meta: Meta,
        args: tuple[Term, ...],
        other: Term,
        mode: ConvMode,
    ) -> RefinerState | None:
        """First-order approximation ``?j a⃗ ≡ h b⃗ u⃗`` by ``?j ≡ h b⃗`` and ``a⃗ ≡ u⃗``."""
        head, other_args = decompose_app(other)
        n = len(args)
        if len(other_args) < n:
            return None
        prefix = mk_app(head, other_args[: len(other_args) - n])
        current = self._unify(st, ctx, meta, prefix, ConvMode.EXACT)
        if current is None:
            return None
        return self._pointwise(current, ctx, args, other_args[len(other_args) - n :])

    def _abstract_args(
        self,
        st: RefinerState,
        ctx: Context,
        meta: Meta,
        args: tuple[Term, ...],
        other: Term,
    ) -> RefinerState | None:
        """``?j a1 ... an ≡ t`` by ``?j := λx⃗. t`` with every a_i in t replaced by x_i."""
        decl = st.problem[meta.index]
        reducer = Reducer(self.env, st.subst)
        telescope, _ = reducer.whd_prods(ctx, instantiate(decl.ty, meta.local_subst), len(args))
        if len(telescope) != len(args):
            return None
        body = st.instantiate(other)
        for i, a in enumerate(args):
            body = abstract(body, lift(st.instantiate(a), i))
        return self._instantiate(st, ctx, meta, mk_lambdas(telescope, body))

    # Instantiation

    def _instantiate(
        self, st: RefinerState, ctx: Context, meta: Meta, t: Term
    ) -> RefinerState | None:
        """Assign ``?j := u`` with ``u[σ] ≡ t``, typed against ?j's declared type."""
        index = meta.index
        decl = st.problem[index]
        t = st.instantiate(t)
        reducer = Reducer(self.env, st.subst)
        if decl.is_sort:
            w = reducer.whd(ctx, t)
            if not (isinstance(w, Sort) or (isinstance(w, Meta) and st.is_sort_meta(w.index))):
                return None
            t = w
        body = delift(st, ctx, meta, t)
        if body is None:
            w = reducer.whd(ctx, t)
            if w != t:
                body = delift(st, ctx, meta, w)
        if body is None:
            return None
        found = metas_of(body)
        if index in found or any(depends_on(st.problem, st.subst, m, index) for m in found):
            return None
        try:
            body_ty = st.checker(self.env).infer(decl.context, body)
        except KernelError:
            return None
        typed = self._unify(st, decl.context, body_ty, decl.ty, ConvMode.CUMULATIVE)
        if typed is None or not typed.is_open(index):
            return None
        result = typed.assign(index, body)
        if not result.is_valid():
            return None
        logger.debug(f"?{index} := {pretty(body, context_names(decl.context))}")
        return result


@dataclass
class _Delifter:
    """Express a term of Γ in the context of ?j through ?j's local substitution."""

    st: RefinerState
    ctx: Context
    meta: Meta

    def _project(self, t: Term, depth: int) -> Term | None:
        rels = free_rels(t)
        if rels and min(rels) < depth:
            return None
        lowered = lift(t, -depth) if depth else t
        subst = self.meta.local_subst
        n = len(subst)
        for i, entry in enumerate(subst):
            if entry == lowered:
                return Rel(depth + n - 1 - i)
        return None

    def delift(self, t: Term, depth: int) -> Term:
        if not isinstance(t, Sort):
            projected = self._project(t, depth)
            if projected is not None:
                return projected
        match t:
            case Rel(index=i):
                if i < depth:
                    return t
                outer = i - depth
                if outer < len(self.ctx) and isinstance(self.ctx[-1 - outer], Def):
                    value = lift(self.ctx[-1 - outer].value, outer + 1 + depth)
                    return self.delift(value, depth)
                raise _NoDelift
            case Const() | Sort():
                return t
            case Meta(index=index, local_subst=local_subst):
                if index == self.meta.index:
                    raise _NoDelift
                return Meta(index, tuple(self.delift(s, depth) for s in local_subst))
            case App(head=head, args=args):
                return App(self.delift(head, depth), tuple(self.delift(a, depth) for a in args))
            case Lambda(name=name, ty=ty, body=body):
                return Lambda(name, self.delift(ty, depth), self.delift(body, depth + 1))
            case Prod(name=name, ty=ty, body=body):
                return Prod(name, self.delift(ty, depth), self.delift(body, depth + 1))
            case LetIn(name=name, ty=ty, value=value, body=body):
                return LetIn(
                    name,
                    self.delift(ty, depth),
                    self.delift(value, depth),
                    self.delift(body, depth + 1),
                )
            case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
                return Match(
                    self.delift(scrutinee, depth),
                    ind,
                    self.delift(return_ty, depth),
                    tuple(
                        Branch(
                            b.constructor,
                            tuple(
                                Binder(x.name, self.delift(x.ty, depth + i))
                                for i, x in enumerate(b.binders)
                            ),
                            self.delift(b.body, depth + len(b.binders)),
                        )
                        for b in branches
                    ),
                )
        raise _NoDelift


def delift(st: RefinerState, ctx: Context, meta: Meta, t: Term) -> Term | None:
    """Express t, a term of ctx, in the context of meta, or None when impossible.

    Subterms equal to an entry of the local substitution become the matching
    variable; local definitions are unfolded on the way.
    """
    try:
        return _Delifter(st, ctx, meta).delift(t, 0)
    except _NoDelift:
        return None


def unify(
    env: GlobalEnv,
    st: RefinerState,
    ctx: Context,
    t1: Term,
    t2: Term,
    mode: ConvMode = ConvMode.CUMULATIVE,
) -> RefinerState:
    """Module-level entry point; see Unifier.unify."""
    return Unifier(env).unify(st, ctx, t1, t2, mode)


__all__ = ["Unifier", "delift", "unify"]
