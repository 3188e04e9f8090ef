"""Refiner state: the (P, S) pair threaded through every judgment.

TIER 3: May import from core, lib and kernel.

A RefinerState is an immutable value. Fresh metavariables are numbered past
every index already in use, so a state can be extended from any earlier one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from core.metas import (
    EMPTY_PROBLEM,
    EMPTY_SUBST,
    MetaDecl,
    MetaDef,
    ProofProblem,
    Substitution,
    apply_subst,
    apply_subst_context,
    check_valid_proof_problem,
    identity_subst,
)
from core.terms import Context, Meta, Term, type_sort
from core.types import TOP_UNIVERSE
from kernel.environment import GlobalEnv
from kernel.typecheck import TypeChecker


@dataclass(frozen=True)
class RefinerState:
    """Open metavariables P, assignments S and the next free index."""

    problem: ProofProblem = EMPTY_PROBLEM
    subst: Substitution = EMPTY_SUBST
    next_index: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        used = [*self.problem, *self.subst]
        if used and max(used) >= self.next_index:
            object.__setattr__(self, "next_index", max(used) + 1)

    # Metavariables

    def fresh_meta(
        self, ctx: Context, ty: Term, is_sort: bool = False
    ) -> tuple[Meta, RefinerState]:
        """Declare ``ctx ⊢ ?n : ty``; return ``?n`` under the identity substitution."""
        index = self.next_index
        problem = self.problem.with_decl(index, MetaDecl(tuple(ctx), ty, is_sort))
        state = RefinerState(problem, self.subst, index + 1)
        return Meta(index, identity_subst(ctx)), state

    def fresh_sort_meta(self, ctx: Context = ()) -> tuple[Meta, RefinerState]:
        """Sort-flagged metavariable of type Type(top), declared in ctx.

        Its values are closed sorts, so the occurrence carries no local
        substitution whatever the context.
        """
        meta, state = self.fresh_meta(ctx, type_sort(TOP_UNIVERSE), is_sort=True)
        return Meta(meta.index), state

    def assign(self, index: int, body: Term) -> RefinerState:
        """Move ?index from P to S with the given body."""
        decl = self.problem[index]
        subst = self.subst.with_assignment(
            index, MetaDef(decl.context, body, decl.ty, decl.is_sort)
        )
        return RefinerState(self.problem.without(index), subst, self.next_index)

    def is_open(self, index: int) -> bool:
        return index in self.problem

    def is_sort_meta(self, index: int) -> bool:
        return index in self.problem and self.problem[index].is_sort

    # Views

    def instantiate(self, t: Term) -> Term:
        """apply_subst with the current S."""
        return apply_subst(self.subst, t)

    def instantiate_context(self, ctx: Context) -> Context:
        return apply_subst_context(self.subst, ctx)

    def checker(self, env: GlobalEnv) -> TypeChecker:
        return TypeChecker(env, self.problem, self.subst)

    def new_metas(self, older: RefinerState) -> list[int]:
        """Open metavariables not open in ``older``: the obligations created since."""
        return [index for index in self.problem if index not in older.problem]

    # Contract checks

    def refines(self, older: RefinerState) -> bool:
        """``self ≤ older``: S grows and every old meta is still open or assigned."""
        for index, assignment in older.subst.items():
            if self.subst.get(index) != assignment:
                return False
        return all(index in self.problem or index in self.subst for index in older.problem)

    def check(self, env: GlobalEnv) -> None:
        """Kernel well-formedness of P and S.

        Raises:
            KernelError: On the first violated premise.
        """
        checker = self.checker(env)
        checker.check_metasenv()
        checker.check_subst()

    def is_valid(self) -> bool:
        return check_valid_proof_problem(self.problem, self.subst)

    def summary(self) -> str:
        return f"|P|={len(self.problem)} |S|={len(self.subst)}"
