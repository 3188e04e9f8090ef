"""Object formation: the kernel check run before an object enters E.

TIER 2: May import from core and lib.

``typecheck_obj`` returns the object in resolved form: inductive arities and
constructor types are unfolded to syntactic products, and recursive blocks
carry their recursive argument positions.
"""

from __future__ import annotations

import itertools

from core.errors import (
    GuardError,
    KernelError,
    MatchShapeError,
    NotASortError,
    UniverseError,
)
from core.metas import EMPTY_PROBLEM, EMPTY_SUBST, ProofProblem, Substitution
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
from core.terms import Const, Sort, decompose_app, mk_prods
from core.types import ConvMode
from kernel.environment import GlobalEnv
from kernel.guard import check_cofix_guard, check_fix_guard, rec_arg_candidates
from kernel.inductives import check_constructor
from kernel.typecheck import TypeChecker
from lib.logger import get_logger

logger = get_logger("kernel")


def typecheck_obj(
    env: GlobalEnv,
    obj: GlobalObject,
    problem: ProofProblem = EMPTY_PROBLEM,
    subst: Substitution = EMPTY_SUBST,
) -> GlobalObject:
    """Check an object against the formation rules and return it resolved.

    Raises:
        KernelError: The subclass naming the failed condition.
    """
    env.check_fresh(obj)
    match obj:
        case Axiom(name=name, ty=ty):
            TypeChecker(env, problem, subst).sort_of((), ty)
            logger.debug(f"axiom {name} accepted")
            return obj
        case Definition():
            return _check_definition(env, obj, problem, subst)
        case InductiveBlock():
            return _check_inductive(env, obj, problem, subst)
        case RecBlock():
            return _check_rec(env, obj, problem, subst)
    raise KernelError(f"not an object: {obj!r}")


def _check_definition(
    env: GlobalEnv, obj: Definition, problem: ProofProblem, subst: Substitution
) -> Definition:
    checker = TypeChecker(env, problem, subst)
    checker.sort_of((), obj.ty)
    checker.expect((), checker.infer((), obj.body), obj.ty, f"body of {obj.name}")
    logger.debug(f"definition {obj.name} accepted")
    return obj


def _check_inductive(
    env: GlobalEnv, block: InductiveBlock, problem: ProofProblem, subst: Substitution
) -> InductiveBlock:
    checker = TypeChecker(env, problem, subst)
    params = block.params
    checker.check_context(params)

    arities: list[InductiveType] = []
    sorts: dict[str, Sort] = {}
    for ind in block.types:
        checker.sort_of(params, ind.arity)
        telescope, concl = checker.reducer.whd_prods(params, ind.arity)
        if not isinstance(concl, Sort):
            raise NotASortError(f"arity of {ind.name} must end in a sort")
        sorts[ind.name] = concl
        arities.append(InductiveType(ind.name, mk_prods(telescope, concl), ()))
    signature = InductiveBlock(params, tuple(arities), block.coinductive)
    sig_env = env.with_signatures(signature)
    sig_checker = TypeChecker(sig_env, problem, subst)
    names = block.names
    index_counts = {ind.name: sig_env.inductive(ind.name).index_count for ind in block.types}

    resolved: list[InductiveType] = []
    for ind, shape in zip(block.types, arities, strict=True):
        constructors = []
        for k in ind.constructors:
            sort = sig_checker.sort_of(params, k.ty)
            if not sig_checker.convert(params, sort, sorts[ind.name], ConvMode.CUMULATIVE):
                raise UniverseError(
                    f"constructor {k.name} lives in a larger universe than {ind.name}"
                )
            telescope, concl = sig_checker.reducer.whd_prods(params, k.ty)
            head, args = decompose_app(concl)
            if head != Const(ind.name) or len(args) != len(params) + index_counts[ind.name]:
                raise MatchShapeError(f"constructor {k.name} must build an {ind.name}")
            check_constructor(
                sig_checker.reducer, params, telescope, concl, ind.name, names, index_counts
            )
            constructors.append(Constructor(k.name, mk_prods(telescope, concl)))
        resolved.append(InductiveType(ind.name, shape.arity, tuple(constructors)))
    logger.debug(f"inductive block {', '.join(names)} accepted")
    return InductiveBlock(params, tuple(resolved), block.coinductive)


def _check_rec(
    env: GlobalEnv, block: RecBlock, problem: ProofProblem, subst: Substitution
) -> RecBlock:
    checker = TypeChecker(env, problem, subst)
    for f in block.functions:
        checker.check_context(f.binders)
        checker.sort_of(f.binders, f.return_ty)

    sig_env = env.with_signatures(block)
    sig_checker = TypeChecker(sig_env, problem, subst)
    for f in block.functions:
        sig_checker.expect(
            f.binders, sig_checker.infer(f.binders, f.body), f.return_ty, f"body of {f.name}"
        )

    if block.corecursive:
        for f in block.functions:
            concl = sig_checker.whd(f.binders, f.return_ty)
            head, _ = decompose_app(concl)
            if not (
                isinstance(head, Const)
                and env.is_inductive(head.name)
                and env.inductive(head.name).coinductive
            ):
                raise GuardError(f"corecursive {f.name} must return a coinductive type")
        check_cofix_guard(sig_env, block)
        logger.debug(f"corecursive block {', '.join(block.names)} accepted")
        return block

    return _resolve_rec_args(sig_env, block)


def _resolve_rec_args(env: GlobalEnv, block: RecBlock) -> RecBlock:
    """Check the guard, inferring the recursive positions that were not given."""
    candidates = rec_arg_candidates(env, block)
    choices: list[list[int]] = []
    for f, positions in zip(block.functions, candidates, strict=True):
        if f.rec_arg is not None:
            if not 0 <= f.rec_arg < len(f.binders):
                raise GuardError(f"{f.name} has no argument at position {f.rec_arg}")
            choices.append([f.rec_arg])
        elif positions:
            choices.append(positions)
        else:
            raise GuardError(f"{f.name} has no argument of an inductive type to recurse on")

    last_error: GuardError | None = None
    for rec_args in itertools.product(*choices):
        try:
            check_fix_guard(env, block, rec_args)
        except GuardError as e:
            last_error = e
            continue
        logger.debug(f"recursive block {', '.join(block.names)} accepted on {rec_args}")
        return RecBlock(
            tuple(
                RecFunction(f.name, f.binders, f.return_ty, f.body, position)
                for f, position in zip(block.functions, rec_args, strict=True)
            ),
            corecursive=False,
        )
    assert last_error is not None
    raise last_error


__all__ = ["typecheck_obj"]
