"""Kernel type checker for internal terms with metavariables.

TIER 2: May import from core and lib.

The checker implements the typing judgment ``E, P, S, Γ ⊢ t : T`` and the
well-formedness judgments for contexts, proof problems and substitutions. It
never modifies P or S.

PTS instance: ``Prop : Type(0)``, ``Type(u) : Type(u+1)``; products into
Prop are impredicative, products between Type levels take the maximum.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.debruijn import instantiate, lift
from core.errors import (
    ConversionError,
    EliminationError,
    InvalidProofProblemError,
    KernelError,
    MatchShapeError,
    NotAProductError,
    NotASortError,
    PlaceholderError,
    UnboundVariableError,
    UndeclaredMetaError,
    UniverseError,
)
from core.metas import (
    EMPTY_PROBLEM,
    EMPTY_SUBST,
    MetaDecl,
    MetaDef,
    ProofProblem,
    Substitution,
    check_valid_proof_problem,
)
from core.pretty import pretty
from core.terms import (
    PROP,
    App,
    Const,
    Context,
    Decl,
    Def,
    LetIn,
    Lambda,
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
    mk_lambdas,
    mk_prods,
    type_sort,
)
from core.types import TOP_UNIVERSE, ConvMode
from kernel.conversion import Converter
from kernel.reduction import Reducer
from lib import config

if TYPE_CHECKING:
    from kernel.environment import GlobalEnv


def elim_allowed(s_ind: Sort, s_ret: Sort) -> bool:
    """Whether a match on an inductive of sort s_ind may return in s_ret.

    Prop cannot be eliminated into Type.
    """
    return not (s_ind.is_prop and not s_ret.is_prop)


class TypeChecker:
    """Typing in a fixed (E, P, S)."""

    def __init__(
        self,
        env: GlobalEnv,
        problem: ProofProblem = EMPTY_PROBLEM,
        subst: Substitution = EMPTY_SUBST,
        impredicative_prop: bool | None = None,
    ):
        self.env = env
        self.problem = problem
        self.subst = subst
        self.reducer = Reducer(env, subst)
        self.converter = Converter(env, problem, subst, self.reducer)
        if impredicative_prop is None:
            impredicative_prop = bool(config.get("kernel.impredicative_prop", True))
        self.impredicative_prop = impredicative_prop

    # Helpers shared with the refiner

    def whd(self, ctx: Context, t: Term) -> Term:
        return self.reducer.whd(ctx, t)

    def convert(
        self, ctx: Context, t1: Term, t2: Term, mode: ConvMode = ConvMode.CUMULATIVE
    ) -> bool:
        return self.converter.convert(ctx, t1, t2, mode)

    def is_sort_meta(self, t: Term) -> bool:
        return self.converter.is_sort_meta(t)

    def product_sort(self, s1: Term, s2: Term) -> Term:
        """Sort of ``Π x:A.B`` with ``A : s1`` and ``B : s2``.

        Either side may be an open sort-flagged metavariable; Type(top) then
        bounds the result from above.
        """
        if isinstance(s2, Sort) and s2.is_prop and self.impredicative_prop:
            return PROP
        if isinstance(s1, Sort) and isinstance(s2, Sort):
            if s1.is_prop:
                return s2 if not s2.is_prop else PROP
            if s2.is_prop:
                return s1
            return type_sort(self.env.universes.max(s1.universe, s2.universe))
        if isinstance(s1, Sort) and (s1.is_prop or s1.universe == "0"):
            return s2
        return type_sort(TOP_UNIVERSE)

    def sort_of(self, ctx: Context, ty: Term) -> Term:
        """Check that ty is a type; return its sort (a Sort or a sort meta)."""
        s = self.whd(ctx, self.infer(ctx, ty))
        if isinstance(s, Sort) or self.is_sort_meta(s):
            return s
        raise NotASortError(
            f"expected a type, got {pretty(ty, context_names(ctx))} : "
            f"{pretty(s, context_names(ctx))}"
        )

    def expect(self, ctx: Context, actual: Term, expected: Term, what: str) -> None:
        if not self.convert(ctx, actual, expected, ConvMode.CUMULATIVE):
            names = context_names(ctx)
            raise ConversionError(
                f"{what}: {pretty(actual, names)} is not convertible to {pretty(expected, names)}",
                actual,
                expected,
            )

    # Typing

    def infer(self, ctx: Context, t: Term) -> Term:
        """Return T with ``E, P, S, ctx ⊢ t : T``."""
        match t:
            case Rel(index=i):
                if i >= len(ctx):
                    raise UnboundVariableError(f"variable #{i} is not bound")
                return lift(ctx[-1 - i].ty, i + 1)
            case Sort(universe=None):
                return type_sort("0")
            case Sort(universe=u):
                self.env.check_universe(u)
                return type_sort(self.env.universes.succ(u))
            case Const(name=name):
                return self.env.lookup_type(name)
            case Meta():
                return self._infer_meta(ctx, t)
            case Lambda(name=name, ty=ty, body=body):
                self.sort_of(ctx, ty)
                body_ty = self.infer((*ctx, Decl(name, ty)), body)
                return Prod(name, ty, body_ty)
            case Prod(name=name, ty=ty, body=body):
                s1 = self.sort_of(ctx, ty)
                s2 = self.sort_of((*ctx, Decl(name, ty)), body)
                return self.product_sort(s1, s2)
            case LetIn(name=name, ty=ty, value=value, body=body):
                self.sort_of(ctx, ty)
                self.expect(ctx, self.infer(ctx, value), ty, "let-bound value")
                body_ty = self.infer((*ctx, Def(name, value, ty)), body)
                return instantiate(body_ty, [value])
            case App(head=head, args=args):
                ty = self.infer(ctx, head)
                for arg in args:
                    w = self.whd(ctx, ty)
                    if not isinstance(w, Prod):
                        raise NotAProductError(
                            f"{pretty(head, context_names(ctx))} is applied to too many "
                            f"arguments (type {pretty(w, context_names(ctx))})"
                        )
                    self.expect(ctx, self.infer(ctx, arg), w.ty, "argument")
                    ty = instantiate(w.body, [arg])
                return ty
            case Match():
                return self._infer_match(ctx, t)
            case Placeholder() | PlaceholderVec():
                raise PlaceholderError("the kernel does not accept placeholders")
        raise KernelError(f"not a term: {t!r}")

    def meta_entry(self, index: int) -> MetaDecl | MetaDef:
        if index in self.problem:
            return self.problem[index]
        if index in self.subst:
            return self.subst[index]
        raise UndeclaredMetaError(index)

    def _infer_meta(self, ctx: Context, t: Meta) -> Term:
        entry = self.meta_entry(t.index)
        if entry.is_sort:
            # Sort values are closed: occurrences carry no local substitution
            if t.local_subst:
                raise KernelError(f"sort metavariable ?{t.index} takes no local substitution")
            return entry.ty
        if len(t.local_subst) != len(entry.context):
            raise KernelError(
                f"?{t.index} has {len(entry.context)} context entries but "
                f"{len(t.local_subst)} substituted terms"
            )
        for i, (decl, value) in enumerate(zip(entry.context, t.local_subst, strict=True)):
            expected = instantiate(decl.ty, t.local_subst[:i])
            self.expect(ctx, self.infer(ctx, value), expected, f"local substitution of ?{t.index}")
        return instantiate(entry.ty, t.local_subst)

    def _infer_match(self, ctx: Context, m: Match) -> Term:
        ind = self.env.inductive(m.ind)
        l, r = ind.homogeneous_arity, ind.index_count
        names = context_names(ctx)

        scrut_ty = self.whd(ctx, self.infer(ctx, m.scrutinee))
        head, args = decompose_app(scrut_ty)
        if head != Const(m.ind) or len(args) != l + r:
            raise MatchShapeError(
                f"scrutinee has type {pretty(scrut_ty, names)}, not an instance of {m.ind}"
            )
        params, indices = args[:l], args[l:]

        arity_tele, ind_sort = self.reducer.whd_prods(ctx, instantiate(ind.arity, params), r)
        if not isinstance(ind_sort, Sort):
            raise MatchShapeError(f"arity of {m.ind} does not end in a sort")

        # Return type: Π y⃗:G⃗. Π x : I params y⃗. s'
        ret_tele, ret_sort = self.reducer.whd_prods(ctx, self.infer(ctx, m.return_ty), r + 1)
        if len(ret_tele) != r + 1:
            raise MatchShapeError(f"return type of match on {m.ind} must take {r + 1} arguments")
        local = tuple(ctx)
        for got, want in zip(ret_tele[:r], arity_tele, strict=True):
            if not self.convert(local, got.ty, want.ty, ConvMode.EXACT):
                raise MatchShapeError("return type domains do not match the inductive's indices")
            local = (*local, got)
        instance = mk_app(
            Const(m.ind),
            [*(lift(p, r) for p in params), *(Rel(r - 1 - i) for i in range(r))],
        )
        if not self.convert(local, ret_tele[r].ty, instance, ConvMode.EXACT):
            raise MatchShapeError("return type must abstract over the scrutinee's type")
        local = (*local, ret_tele[r])
        ret_sort = self.whd(local, ret_sort)
        if isinstance(ret_sort, Sort):
            if not elim_allowed(ind_sort, ret_sort):
                raise EliminationError(f"cannot eliminate {m.ind} : Prop into a Type")
        elif self.is_sort_meta(ret_sort):
            if ind_sort.is_prop:
                raise EliminationError(f"elimination sort of a match on {m.ind} is undetermined")
        else:
            raise NotASortError("return type of match must end in a sort")

        # Branches
        if len(m.branches) != len(ind.constructors):
            raise MatchShapeError(
                f"match on {m.ind} needs {len(ind.constructors)} branches, got {len(m.branches)}"
            )
        for branch, k in zip(m.branches, ind.constructors, strict=True):
            if branch.constructor != k:
                raise MatchShapeError(f"expected branch for {k}, got {branch.constructor}")
            cinfo = self.env.constructor(k)
            n = cinfo.arg_count
            if len(branch.binders) != n:
                raise MatchShapeError(f"pattern {k} binds {n} variables, got {len(branch.binders)}")
            ctele, concl = self.reducer.whd_prods(ctx, instantiate(cinfo.ty, params), n)
            _, cargs = decompose_app(concl)
            cons = mk_app(
                Const(k), [*(lift(p, n) for p in params), *(Rel(n - 1 - i) for i in range(n))]
            )
            expected_body = mk_app(lift(m.return_ty, n), [*cargs[l:], cons])
            expected = mk_prods(ctele, expected_body)
            lam = mk_lambdas([Decl(b.name, b.ty) for b in branch.binders], branch.body)
            self.expect(ctx, self.infer(ctx, lam), expected, f"branch {k}")

        return mk_app(m.return_ty, [*indices, m.scrutinee])

    # Well-formedness

    def check_context(self, ctx: Context) -> None:
        for i, entry in enumerate(ctx):
            prefix = ctx[:i]
            self.sort_of(prefix, entry.ty)
            if isinstance(entry, Def):
                self.expect(prefix, self.infer(prefix, entry.value), entry.ty, entry.name)

    def check_metasenv(self) -> None:
        if not check_valid_proof_problem(self.problem, self.subst):
            raise InvalidProofProblemError("metavariable dependencies are cyclic")
        for index, decl in self.problem.items():
            if index in self.subst:
                raise KernelError(f"?{index} is both open and assigned")
            self.check_context(decl.context)
            self.sort_of(decl.context, decl.ty)

    def check_subst(self) -> None:
        for index, assignment in self.subst.items():
            self.check_context(assignment.context)
            self.sort_of(assignment.context, assignment.ty)
            body = assignment.body
            if assignment.is_sort and not isinstance(self.whd(assignment.context, body), Sort):
                if not self.is_sort_meta(self.whd(assignment.context, body)):
                    raise NotASortError(f"sort metavariable ?{index} assigned a non-sort")
            self.expect(
                assignment.context, self.infer(assignment.context, body), assignment.ty, f"?{index}"
            )


def typecheck_term(
    env: GlobalEnv,
    problem: ProofProblem,
    subst: Substitution,
    ctx: Context,
    t: Term,
) -> Term:
    """Type of t in (E, P, S, Γ).

    Raises:
        KernelError: The rule-specific subclass of the first violation.
    """
    return TypeChecker(env, problem, subst).infer(ctx, t)


def typecheck_context(
    env: GlobalEnv, problem: ProofProblem, subst: Substitution, ctx: Context
) -> None:
    TypeChecker(env, problem, subst).check_context(ctx)


def typecheck_metasenv(env: GlobalEnv, problem: ProofProblem, subst: Substitution) -> None:
    TypeChecker(env, problem, subst).check_metasenv()


def typecheck_subst(env: GlobalEnv, problem: ProofProblem, subst: Substitution) -> None:
    TypeChecker(env, problem, subst).check_subst()


__all__ = [
    "TypeChecker",
    "UniverseError",
    "elim_allowed",
    "typecheck_context",
    "typecheck_metasenv",
    "typecheck_subst",
    "typecheck_term",
]
