"""Bi-directional refiner for external terms.

TIER 3: May import from core, lib and kernel.

Judgments, each threading a RefinerState:

- infer (R⇑): external term -> internal term and its type
- force (R⇓): external term checked against an expected type
- enforce_type (F): external term that must be a type
- cast (C): reconcile an inferred and an expected type, inserting coercions
- eat_prods (E^T): consume application arguments along the head's type
- eat_args (E_t): consume a prefix of arguments against given targets

Every judgment returns a Refined triple whose state refines the input
state, and whose term the kernel accepts at the returned type.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

from core.debruijn import abstract, instantiate, lift
from core.errors import (
    ArgumentOverflowError,
    CoercionError,
    EliminationError,
    FuelExhausted,
    KernelError,
    MatchShapeError,
    PlaceholderPositionError,
    RefineError,
    UnboundVariableError,
    UnificationError,
)
from core.metas import identity_subst
from core.pretty import pretty
from core.terms import (
    PROP,
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
    Placeholder,
    PlaceholderVec,
    Prod,
    Rel,
    Sort,
    Term,
    context_names,
    decompose_app,
    mk_app,
    mk_prods,
    type_sort,
)
from core.types import ConvMode
from kernel.environment import GlobalEnv
from kernel.reduction import Reducer, beta_head
from kernel.typecheck import elim_allowed
from lib import config
from lib.logger import get_logger, get_trace_logger, trace_enabled
from refine.coercions import SORT, CoercionDB
from refine.state import RefinerState
from refine.unify import Unifier, delift

logger = get_logger("refiner")
_trace = get_trace_logger()

# Failures that a placeholder vector expansion may backtrack over
_RECOVERABLE = (RefineError, KernelError)

_BINDER_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class Refined:
    """Outcome of a refiner judgment."""

    term: Term
    ty: Term
    state: RefinerState


@dataclass(frozen=True)
class RefinerOptions:
    """Switches of the refiner; defaults come from the ``refiner.*`` config keys."""

    mono: bool = False
    beta_rule: bool = False
    index_propagation: bool = True
    max_steps: int = 200_000

    @classmethod
    def from_config(cls, **overrides: object) -> RefinerOptions:
        options = cls(
            mono=bool(config.get("refiner.mono", False)),
            beta_rule=bool(config.get("refiner.beta_rule", False)),
            index_propagation=bool(config.get("refiner.index_propagation", True)),
            max_steps=int(config.get("refiner.max_steps", 200_000)),
        )
        present = {k: v for k, v in overrides.items() if v is not None}
        return replace(options, **present)


@dataclass
class Refiner:
    """Refinement in a fixed environment E and coercion set Δ."""

    env: GlobalEnv
    coercions: CoercionDB = field(default_factory=CoercionDB)
    options: RefinerOptions = field(default_factory=RefinerOptions.from_config)

    def __post_init__(self) -> None:
        self.unifier = Unifier(self.env)
        self.steps = 0

    # Bookkeeping

    def _step(self, rule: str, ctx: Context, t: Term | None, st: RefinerState) -> None:
        self.steps += 1
        if self.steps > self.options.max_steps:
            raise FuelExhausted("refiner", self.options.max_steps)
        if trace_enabled():
            _trace.info(f"{rule} {_summary(t, ctx)} {st.summary()}")

    def with_env(self, env: GlobalEnv) -> Refiner:
        """Same coercions, options and step count over another environment."""
        other = Refiner(env, self.coercions, self.options)
        other.steps = self.steps
        return other

    def _whd(self, st: RefinerState, ctx: Context, t: Term) -> Term:
        return Reducer(self.env, st.subst).whd(ctx, st.instantiate(t))

    def unify_at(
        self,
        st: RefinerState,
        ctx: Context,
        t1: Term,
        t2: Term,
        mode: ConvMode,
        rule: str,
        at: Term,
    ) -> RefinerState:
        try:
            return self.unifier.unify(st, ctx, t1, t2, mode)
        except UnificationError as e:
            raise UnificationError(
                str(e), rule=rule, span=at.span, expected=e.expected, inferred=e.inferred
            ) from e

    def _flexible(self, st: RefinerState, t: Term) -> Meta | None:
        head, _ = decompose_app(t)
        if isinstance(head, Meta) and st.is_open(head.index):
            return head
        return None

    # R⇑

    def infer(self, st: RefinerState, ctx: Context, t: Term) -> Refined:
        """Infer the type of an external term.

        Raises:
            RefineError: The failing rule, with the offending subterm's span.
            KernelError: Unknown names and unbound variables.
        """
        match t:
            case Rel(index=i):
                self._step("R⇑-variable", ctx, t, st)
                if i >= len(ctx):
                    raise UnboundVariableError(f"variable #{i} is not bound")
                return Refined(t, lift(ctx[-1 - i].ty, i + 1), st)
            case Const(name=name):
                self._step("R⇑-constant", ctx, t, st)
                return Refined(t, self.env.lookup_type(name), st)
            case Sort(universe=None):
                self._step("R⇑-sort", ctx, t, st)
                return Refined(t, type_sort("0"), st)
            case Sort(universe=u):
                self._step("R⇑-sort", ctx, t, st)
                self.env.check_universe(u)
                return Refined(t, type_sort(self.env.universes.succ(u)), st)
            case Meta():
                return self._infer_meta(st, ctx, t)
            case LetIn(name=name, ty=ty, value=value, body=body):
                self._step("R⇑-letin", ctx, t, st)
                ty2, _, st = self.enforce_type(st, ctx, ty)
                v = self.force(st, ctx, value, ty2)
                b = self.infer(v.state, (*ctx, Def(name, v.term, ty2)), body)
                return Refined(
                    LetIn(name, ty2, v.term, b.term, span=t.span),
                    instantiate(b.ty, [v.term]),
                    b.state,
                )
            case Lambda(name=name, ty=ty, body=body):
                self._step("R⇑-lambda", ctx, t, st)
                ty2, _, st = self.enforce_type(st, ctx, ty)
                b = self.infer(st, (*ctx, Decl(name, ty2)), body)
                return Refined(
                    Lambda(name, ty2, b.term, span=t.span), Prod(name, ty2, b.ty), b.state
                )
            case Prod(name=name, ty=ty, body=body):
                self._step("R⇑-product", ctx, t, st)
                ty2, s1, st = self.enforce_type(st, ctx, ty)
                body2, s2, st = self.enforce_type(st, (*ctx, Decl(name, ty2)), body)
                sort = st.checker(self.env).product_sort(st.instantiate(s1), st.instantiate(s2))
                return Refined(Prod(name, ty2, body2, span=t.span), sort, st)
            case App(head=head, args=args):
                self._step("R⇑-appl", ctx, t, st)
                if isinstance(head, PlaceholderVec):
                    raise PlaceholderPositionError(
                        "'...' may only appear as an argument", rule="R⇑-appl", span=head.span
                    )
                h = self.infer(st, ctx, head)
                return self.eat_prods(h.state, ctx, h.term, h.ty, args)
            case Match():
                return self._infer_match(st, ctx, t)
            case Placeholder():
                self._step("R⇑-placeholder", ctx, t, st)
                return self._placeholder(st, ctx)
            case PlaceholderVec():
                raise PlaceholderPositionError(
                    "'...' may only appear as an argument", rule="R⇑", span=t.span
                )
        raise RefineError(f"not a term: {t!r}", rule="R⇑")

    def _placeholder(self, st: RefinerState, ctx: Context) -> Refined:
        """``?l : Type(top)``, ``Γ ⊢ ?k : ?l``, ``Γ ⊢ ?j : ?k``."""
        sort, st = st.fresh_sort_meta()
        ty, st = st.fresh_meta(ctx, sort)
        term, st = st.fresh_meta(ctx, ty)
        return Refined(term, ty, st)

    def _infer_meta(self, st: RefinerState, ctx: Context, t: Meta) -> Refined:
        self._step("R⇑-meta", ctx, t, st)
        entry = st.checker(self.env).meta_entry(t.index)
        if entry.is_sort and not t.local_subst:
            return Refined(t, entry.ty, st)
        if len(t.local_subst) != len(entry.context):
            raise RefineError(
                f"?{t.index} expects {len(entry.context)} substituted terms, "
                f"got {len(t.local_subst)}",
                rule="R⇑-meta",
                span=t.span,
            )
        values: list[Term] = []
        for decl, value in zip(entry.context, t.local_subst, strict=True):
            r = self.force(st, ctx, value, instantiate(decl.ty, values))
            values.append(r.term)
            st = r.state
        return Refined(Meta(t.index, tuple(values), span=t.span), instantiate(entry.ty, values), st)

    def _infer_match(self, st: RefinerState, ctx: Context, m: Match) -> Refined:
        self._step("R⇑-match", ctx, m, st)
        info = self.env.inductive(m.ind)
        l, r = info.homogeneous_arity, info.index_count

        # Parameters and indices of the scrutinee's type
        params: list[Term] = []
        for decl in info.block.params:
            meta, st = st.fresh_meta(ctx, instantiate(decl.ty, params))
            params.append(meta)
        reducer = Reducer(self.env, st.subst)
        arity_tele, _ = reducer.whd_prods(ctx, instantiate(info.arity, params), r)
        indices: list[Term] = []
        for decl in arity_tele:
            meta, st = st.fresh_meta(ctx, instantiate(decl.ty, indices))
            indices.append(meta)
        scrut = self.force(st, ctx, m.scrutinee, mk_app(Const(m.ind), [*params, *indices]))
        st = scrut.state

        # Return type Π y⃗:G⃗. Π x:I u⃗ y⃗. ?s
        sort, st = st.fresh_sort_meta()
        instance = mk_app(
            Const(m.ind), [*(lift(p, r) for p in params), *(Rel(r - 1 - i) for i in range(r))]
        )
        expected = mk_prods(arity_tele, Prod("x", instance, sort))
        ret = self.force(st, ctx, m.return_ty, expected)
        st = ret.state

        s_ind = info.sort or PROP
        s_ret = self._whd(st, ctx, sort)
        if isinstance(s_ret, Sort):
            if not elim_allowed(s_ind, s_ret):
                raise EliminationError(f"cannot eliminate {m.ind} : Prop into a Type")
        elif s_ind.is_prop:
            st = self.unify_at(st, ctx, s_ret, PROP, ConvMode.EXACT, "R⇑-match", m)

        if len(m.branches) != len(info.constructors):
            raise MatchShapeError(
                f"match on {m.ind} needs {len(info.constructors)} branches, got {len(m.branches)}"
            )
        branches: list[Branch] = []
        for branch, k in zip(m.branches, info.constructors, strict=True):
            if branch.constructor != k:
                raise MatchShapeError(f"expected branch for {k}, got {branch.constructor}")
            refined, st = self._refine_branch(st, ctx, branch, params, ret.term, l)
            branches.append(refined)

        result_ty = beta_head(
            mk_app(ret.term, [*(st.instantiate(v) for v in indices), scrut.term]), r + 1
        )
        return Refined(Match(scrut.term, m.ind, ret.term, tuple(branches), span=m.span), result_ty, st)

    def _refine_branch(
        self,
        st: RefinerState,
        ctx: Context,
        branch: Branch,
        params: Sequence[Term],
        return_ty: Term,
        nparams: int,
    ) -> tuple[Branch, RefinerState]:
        cinfo = self.env.constructor(branch.constructor)
        n = cinfo.arg_count
        if len(branch.binders) != n:
            raise MatchShapeError(
                f"pattern {branch.constructor} binds {n} variables, got {len(branch.binders)}"
            )
        reducer = Reducer(self.env, st.subst)
        ctele, concl = reducer.whd_prods(ctx, instantiate(cinfo.ty, list(params)), n)
        local = tuple(ctx)
        binders: list[Binder] = []
        for binder, want in zip(branch.binders, ctele, strict=True):
            ty, _, st = self.enforce_type(st, local, binder.ty)
            st = self.unify_at(st, local, ty, want.ty, ConvMode.EXACT, "R⇑-match", binder.ty)
            binders.append(Binder(binder.name, ty))
            local = (*local, Decl(binder.name, ty))
        _, cargs = decompose_app(concl)
        cons = mk_app(
            Const(branch.constructor),
            [*(lift(p, n) for p in params), *(Rel(n - 1 - i) for i in range(n))],
        )
        expected = mk_app(lift(return_ty, n), [*cargs[nparams:], cons])
        body = self.force(st, local, branch.body, expected)
        return Branch(branch.constructor, tuple(binders), body.term), body.state

    # F

    def enforce_type(
        self, st: RefinerState, ctx: Context, t: Term
    ) -> tuple[Term, Term, RefinerState]:
        """Refine t as a type; return it with its sort (a Sort or a sort meta)."""
        r = self.infer(st, ctx, t)
        st = r.state
        self._step("F", ctx, t, st)
        w = self._whd(st, ctx, r.ty)
        if isinstance(w, Sort) or (isinstance(w, Meta) and st.is_sort_meta(w.index)):
            return r.term, w, st
        if self._flexible(st, w) is not None:
            sort, st2 = st.fresh_sort_meta()
            st2 = self.unify_at(st2, ctx, w, sort, ConvMode.EXACT, "F-ok", t)
            return r.term, self._whd(st2, ctx, sort), st2
        for candidate in self.coercions.lookup(self.env, st, ctx, r.ty, target=SORT):
            try:
                st2 = self.unifier.unify(
                    candidate.state, ctx, candidate.slot, r.term, ConvMode.EXACT
                )
            except UnificationError:
                continue
            s = self._whd(st2, ctx, candidate.result_ty)
            if isinstance(s, Sort) or (isinstance(s, Meta) and st2.is_sort_meta(s.index)):
                return candidate.term, s, st2
        names = context_names(ctx)
        raise CoercionError(
            f"expected a type, got {pretty(r.term, names)} : {pretty(w, names)}",
            rule="F-ok",
            span=t.span,
            inferred=w,
        )

    # C

    def cast(
        self, st: RefinerState, ctx: Context, t: Term, inferred: Term, expected: Term
    ) -> Refined:
        """Make the internal term ``t : inferred`` have type ``expected``.

        Raises:
            CoercionError: Neither the types unify nor any coercion applies.
        """
        self._step("C", ctx, t, st)
        try:
            return Refined(t, expected, self.unifier.unify(st, ctx, inferred, expected))
        except UnificationError as e:
            mismatch = e
        for candidate in self.coercions.lookup(self.env, st, ctx, inferred, expected):
            try:
                st2 = self.unifier.unify(
                    candidate.state, ctx, candidate.slot, t, ConvMode.EXACT
                )
                st2 = self.unifier.unify(st2, ctx, candidate.result_ty, expected)
            except UnificationError:
                continue
            self._step("C-coercion", ctx, candidate.term, st2)
            logger.debug(f"coercion {candidate.entry.const} inserted")
            return Refined(candidate.term, expected, st2)
        raise CoercionError(
            str(mismatch),
            rule="C-coercion",
            span=t.span,
            expected=mismatch.expected,
            inferred=mismatch.inferred,
        )

    # R⇓

    def force(self, st: RefinerState, ctx: Context, t: Term, expected: Term) -> Refined:
        """Refine t against an expected type; the result has exactly that type.

        Raises:
            RefineError: The failing rule, with the offending subterm's span.
            KernelError: Unknown names and unbound variables.
        """
        if self.options.mono:
            return self._force_default(st, ctx, t, expected)
        match t:
            case Placeholder():
                return self._force_placeholder(st, ctx, t, expected)
            case PlaceholderVec():
                raise PlaceholderPositionError(
                    "'...' may only appear as an argument", rule="R⇓", span=t.span
                )
            case Lambda():
                w = self._whd(st, ctx, expected)
                if isinstance(w, Prod):
                    return self._force_lambda(st, ctx, t, w, expected)
            case LetIn():
                return self._force_letin(st, ctx, t, expected)
            case App(head=Const(name=name)) if self.env.is_constructor(name):
                result = self._force_constructor(st, ctx, t, expected)
                if result is not None:
                    return result
            case App(head=Lambda(), args=(_,)) if self.options.beta_rule:
                return self._force_beta(st, ctx, t, expected)
            case App(args=args) if any(isinstance(a, PlaceholderVec) for a in args):
                return self._force_vector_application(st, ctx, t, expected)
        return self._force_default(st, ctx, t, expected)

    def _force_vector_application(
        self, st: RefinerState, ctx: Context, t: App, expected: Term
    ) -> Refined:
        """A trailing '...' may still have to grow to meet the expected type."""
        self._step("R⇓-appl", ctx, t, st)
        if isinstance(t.head, PlaceholderVec):
            raise PlaceholderPositionError(
                "'...' may only appear as an argument", rule="R⇓-appl", span=t.head.span
            )
        h = self.infer(st, ctx, t.head)
        return self.eat_prods(h.state, ctx, h.term, h.ty, t.args, expected)

    def _force_placeholder(
        self, st: RefinerState, ctx: Context, t: Term, expected: Term
    ) -> Refined:
        self._step("R⇓-placeholder", ctx, t, st)
        meta, st = st.fresh_meta(ctx, expected)
        return Refined(meta, expected, st)

    def _force_default(
        self, st: RefinerState, ctx: Context, t: Term, expected: Term
    ) -> Refined:
        self._step("R⇓-default", ctx, t, st)
        r = self.infer(st, ctx, t)
        c = self.cast(r.state, ctx, r.term, r.ty, expected)
        return Refined(c.term, expected, c.state)

    def _force_lambda(
        self, st: RefinerState, ctx: Context, t: Lambda, w: Prod, expected: Term
    ) -> Refined:
        self._step("R⇓-lambda", ctx, t, st)
        ty, _, st = self.enforce_type(st, ctx, t.ty)
        st = self.unify_at(st, ctx, ty, w.ty, ConvMode.EXACT, "R⇓-lambda", t.ty)
        # The body sees the declared domain
        b = self.force(st, (*ctx, Decl(t.name, ty)), t.body, w.body)
        return Refined(Lambda(t.name, ty, b.term, span=t.span), expected, b.state)

    def _force_letin(
        self, st: RefinerState, ctx: Context, t: LetIn, expected: Term
    ) -> Refined:
        self._step("R⇓-letin", ctx, t, st)
        ty, _, st = self.enforce_type(st, ctx, t.ty)
        v = self.force(st, ctx, t.value, ty)
        body_ty = abstract(v.state.instantiate(expected), v.term)
        b = self.force(v.state, (*ctx, Def(t.name, v.term, ty)), t.body, body_ty)
        return Refined(LetIn(t.name, ty, v.term, b.term, span=t.span), expected, b.state)

    def _force_beta(self, st: RefinerState, ctx: Context, t: App, expected: Term) -> Refined:
        self._step("R⇓-beta", ctx, t, st)
        lam = t.head
        assert isinstance(lam, Lambda)
        ty, _, st = self.enforce_type(st, ctx, lam.ty)
        u = self.force(st, ctx, t.args[0], ty)
        body_ty = abstract(u.state.instantiate(expected), u.term)
        b = self.force(u.state, (*ctx, Decl(lam.name, ty)), lam.body, body_ty)
        return Refined(
            App(Lambda(lam.name, ty, b.term, span=lam.span), (u.term,), span=t.span),
            expected,
            b.state,
        )

    def _force_constructor(
        self, st: RefinerState, ctx: Context, t: App, expected: Term
    ) -> Refined | None:
        """R⇓-appl-k, or None when the expected type is not an instance of k's inductive."""
        head = t.head
        assert isinstance(head, Const)
        cinfo = self.env.constructor(head.name)
        info = self.env.inductive(cinfo.inductive)
        l = info.homogeneous_arity
        w = self._whd(st, ctx, expected)
        ind_head, ind_args = decompose_app(w)
        if ind_head != Const(cinfo.inductive) or len(ind_args) != l + info.index_count:
            return None
        self._step("R⇓-appl-k", ctx, t, st)

        params, rest, st = self.eat_args(st, ctx, t.args, ind_args[:l])
        kty = instantiate(cinfo.ty, params)
        partial = mk_app(head, params)
        if self.options.index_propagation:
            guided = self._guided_constructor(st, ctx, partial, kty, rest, expected)
            if guided is not None:
                return guided
        vectors = any(isinstance(a, PlaceholderVec) for a in rest)
        r = self.eat_prods(st, ctx, partial, kty, rest, expected if vectors else None)
        try:
            st2 = self.unifier.unify(r.state, ctx, r.ty, expected, ConvMode.EXACT)
            return Refined(r.term, expected, st2)
        except UnificationError:
            c = self.cast(r.state, ctx, r.term, r.ty, expected)
            return Refined(c.term, expected, c.state)

    def _guided_constructor(
        self,
        st: RefinerState,
        ctx: Context,
        partial: Term,
        kty: Term,
        args: Sequence[Term],
        expected: Term,
    ) -> Refined | None:
        """Unify the constructor's conclusion with the expected type before the arguments."""
        if any(isinstance(a, PlaceholderVec) for a in args):
            return None
        reducer = Reducer(self.env, st.subst)
        telescope, concl = reducer.whd_prods(ctx, kty)
        if len(telescope) != len(args):
            return None
        hints: list[Term] = []
        try:
            for decl in telescope:
                hint, st = st.fresh_meta(ctx, instantiate(decl.ty, hints))
                hints.append(hint)
            st = self.unifier.unify(
                st, ctx, instantiate(concl, hints), expected, ConvMode.EXACT
            )
            forced: list[Term] = []
            for decl, hint, arg in zip(telescope, hints, args, strict=True):
                domain = instantiate(decl.ty, forced)
                r = self.force(st, ctx, arg, domain)
                st = self.unifier.unify(r.state, ctx, r.term, hint, ConvMode.EXACT)
                forced.append(r.term)
        except _RECOVERABLE as e:
            logger.debug(f"index-guided application of {_summary(partial, ctx)} failed: {e}")
            return None
        self._step("R⇓-appl-k-guided", ctx, partial, st)
        return Refined(mk_app(partial, forced), expected, st)

    # E^T

    def eat_prods(
        self,
        st: RefinerState,
        ctx: Context,
        head: Term,
        ty: Term,
        args: Sequence[Term],
        expected: Term | None = None,
    ) -> Refined:
        """Apply head (of type ty) to external arguments, one product at a time.

        With an expected type the finished application is cast to it, so a
        trailing '...' keeps growing until the cast succeeds.

        Raises:
            ArgumentOverflowError: More arguments than products and no
                coercion to a function type applies.
        """
        return self._eat_prods(st, ctx, head, (), ty, tuple(args), expected)

    def _eat_prods(
        self,
        st: RefinerState,
        ctx: Context,
        head: Term,
        processed: tuple[tuple[str, Term, Term], ...],
        ty: Term,
        args: tuple[Term, ...],
        expected: Term | None = None,
    ) -> Refined:
        term = mk_app(head, [value for _, value, _ in processed])
        if not args:
            self._step("E^T-empty", ctx, term, st)
            if expected is None:
                return Refined(term, ty, st)
            c = self.cast(st, ctx, term, ty, expected)
            return Refined(c.term, expected, c.state)
        arg, rest = args[0], args[1:]

        if isinstance(arg, PlaceholderVec):
            try:
                self._step("E^T-...-0", ctx, arg, st)
                return self._eat_prods(st, ctx, head, processed, ty, rest, expected)
            except _RECOVERABLE:
                if not isinstance(self._whd(st, ctx, ty), Prod):
                    raise
            self._step("E^T-...+1", ctx, arg, st)
            return self._eat_prods(
                st,
                ctx,
                head,
                processed,
                ty,
                (Placeholder(span=arg.span), arg, *rest),
                expected,
            )

        w = self._whd(st, ctx, ty)
        if isinstance(w, Prod):
            self._step("E^T-prod", ctx, arg, st)
            r = self.force(st, ctx, arg, w.ty)
            return self._eat_prods(
                r.state,
                ctx,
                head,
                (*processed, (w.name, r.term, w.ty)),
                instantiate(w.body, [r.term]),
                rest,
                expected,
            )
        if self._flexible(st, w) is not None:
            return self._eat_flexible(st, ctx, head, processed, w, arg, rest, expected)
        return self._eat_coercion(st, ctx, term, ty, args, expected)

    def _eat_flexible(
        self,
        st: RefinerState,
        ctx: Context,
        head: Term,
        processed: tuple[tuple[str, Term, Term], ...],
        w: Term,
        arg: Term,
        rest: tuple[Term, ...],
        expected: Term | None = None,
    ) -> Refined:
        """The head's type is an open metavariable: make it a product on demand."""
        self._step("E^T-flexible", ctx, arg, st)
        r = self.infer(st, ctx, arg)
        st = r.state
        name = _binder_name(len(processed))
        arg_ty = st.instantiate(r.ty)
        meta = self._flexible(st, w)
        assert meta is not None

        # Preferred: extend the metavariable's own context
        product: Term | None = None
        if w == meta and not st.is_sort_meta(meta.index):
            decl = st.problem[meta.index]
            domain = delift(st, ctx, meta, arg_ty)
            if domain is not None:
                extended = (*decl.context, Decl(name, domain))
                sort, st2 = st.fresh_sort_meta(extended)
                body, st2 = st2.fresh_meta(extended, sort)
                candidate = Prod(
                    name,
                    arg_ty,
                    Meta(body.index, (*(lift(s, 1) for s in meta.local_subst), Rel(0, name))),
                )
                try:
                    st = self.unifier.unify(st2, ctx, w, candidate, ConvMode.EXACT)
                    product = candidate
                except UnificationError:
                    product = None
        if product is None:
            local = (*ctx, Decl(name, arg_ty))
            sort, st2 = st.fresh_sort_meta(local)
            body, st2 = st2.fresh_meta(local, sort)
            candidate = Prod(name, arg_ty, Meta(body.index, identity_subst(local)))
            st = self.unify_at(st2, ctx, w, candidate, ConvMode.EXACT, "E^T-flexible", arg)
            product = candidate
        assert isinstance(product, Prod)
        return self._eat_prods(
            st,
            ctx,
            head,
            (*processed, (name, r.term, arg_ty)),
            instantiate(product.body, [r.term]),
            rest,
            expected,
        )

    def _eat_coercion(
        self,
        st: RefinerState,
        ctx: Context,
        term: Term,
        ty: Term,
        args: tuple[Term, ...],
        expected: Term | None = None,
    ) -> Refined:
        """Coerce the partial application to a function type and go on."""
        self._step("E^T-coercion", ctx, term, st)
        sort1, st2 = st.fresh_sort_meta()
        domain, st2 = st2.fresh_meta(ctx, sort1)
        sort2, st2 = st2.fresh_sort_meta()
        local = (*ctx, Decl("x", domain))
        codomain, st2 = st2.fresh_meta(local, sort2)
        target = Prod("x", domain, codomain)
        try:
            c = self.cast(st2, ctx, term, ty, target)
        except CoercionError as e:
            names = context_names(ctx)
            raise ArgumentOverflowError(
                f"{pretty(term, names)} : {pretty(st.instantiate(ty), names)} "
                f"cannot be applied to {len(args)} more argument(s)",
                rule="E^T-coercion",
                span=args[0].span,
                inferred=st.instantiate(ty),
            ) from e
        return self._eat_prods(c.state, ctx, c.term, (), target, args, expected)

    # E_t

    def eat_args(
        self,
        st: RefinerState,
        ctx: Context,
        args: Sequence[Term],
        targets: Sequence[Term],
    ) -> tuple[list[Term], list[Term], RefinerState]:
        """Consume one argument per target, each exact-unified with its target.

        Returns the consumed (refined) arguments, the untouched rest and the
        new state.
        """
        consumed, rest, st = self._eat_args(st, ctx, tuple(args), tuple(targets), ())
        return list(consumed), list(rest), st

    def _eat_args(
        self,
        st: RefinerState,
        ctx: Context,
        args: tuple[Term, ...],
        targets: tuple[Term, ...],
        consumed: tuple[Term, ...],
    ) -> tuple[tuple[Term, ...], tuple[Term, ...], RefinerState]:
        if not targets:
            self._step("E_t-empty", ctx, None, st)
            return consumed, args, st
        position = len(consumed) + 1
        if not args:
            raise RefineError(
                f"expected at least {len(targets)} more argument(s) at position {position}",
                rule="E_t",
            )
        arg = args[0]
        if isinstance(arg, PlaceholderVec):
            try:
                self._step("E_t-...-0", ctx, arg, st)
                return self._eat_args(st, ctx, args[1:], targets, consumed)
            except _RECOVERABLE:
                pass
            self._step("E_t-...+1", ctx, arg, st)
            return self._eat_args(
                st, ctx, (Placeholder(span=arg.span), *args), targets, consumed
            )
        self._step("E_t-base", ctx, arg, st)
        r = self.infer(st, ctx, arg)
        try:
            st = self.unifier.unify(r.state, ctx, r.term, targets[0], ConvMode.EXACT)
        except UnificationError as e:
            raise UnificationError(
                f"argument {position}: {e}",
                rule="E_t-base",
                span=arg.span,
                expected=e.expected,
                inferred=e.inferred,
            ) from e
        return self._eat_args(st, ctx, args[1:], targets[1:], (*consumed, r.term))


def _binder_name(position: int) -> str:
    if position < len(_BINDER_NAMES):
        return _BINDER_NAMES[position]
    return f"x{position}"


def _summary(t: Term | None, ctx: Context, width: int = 60) -> str:
    if t is None:
        return "-"
    text = " ".join(pretty(t, context_names(ctx)).split())
    return text if len(text) <= width else text[: width - 3] + "..."


__all__ = ["Refined", "Refiner", "RefinerOptions"]
