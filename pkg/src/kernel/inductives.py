"""Strict positivity for inductive blocks.

TIER 2: May import from core and lib.

Constructor types are checked in the context of the homogeneous parameters,
already split into an argument telescope and a conclusion. An argument type
is positive when the block's names do not occur in it, or when it is a
product ``Π z⃗ : B⃗. I params u⃗`` whose domains B⃗ and indices u⃗ are free of
the block's names and whose parameters are the block parameters verbatim.
"""

from __future__ import annotations

from collections.abc import Collection

from core.errors import PositivityError
from core.terms import (
    Const,
    Context,
    Decl,
    Rel,
    Term,
    decompose_app,
    subterms,
)
from kernel.reduction import Reducer


def mentions(t: Term, names: Collection[str]) -> bool:
    """Check whether any of the global names occurs in t."""
    stack = [t]
    while stack:
        current = stack.pop()
        if isinstance(current, Const) and current.name in names:
            return True
        stack.extend(subterms(current))
    return False


def params_verbatim(args: tuple[Term, ...], nparams: int, depth: int) -> bool:
    """The first nparams args are the block parameters seen under depth binders."""
    if len(args) < nparams:
        return False
    return all(
        args[i] == Rel(depth + nparams - 1 - i) for i in range(nparams)
    )


def check_conclusion(
    concl: Term, names: Collection[str], expected: str, nparams: int, depth: int
) -> tuple[Term, ...]:
    """Check ``expected params u⃗`` with u⃗ free of the block; return u⃗."""
    head, args = decompose_app(concl)
    if head != Const(expected):
        raise PositivityError(f"constructor of {expected} must build an {expected}")
    if not params_verbatim(args, nparams, depth):
        raise PositivityError(f"{expected} must be applied to its parameters verbatim")
    indices = args[nparams:]
    if any(mentions(u, names) for u in indices):
        raise PositivityError(f"indices of {expected} must not mention the inductive types")
    return indices


def check_positive_arg(
    reducer: Reducer,
    ctx: Context,
    ty: Term,
    names: Collection[str],
    nparams: int,
    index_counts: dict[str, int],
) -> None:
    """Check one constructor argument type for strict positivity.

    ctx is the parameters followed by the previous arguments.
    """
    if not mentions(ty, names):
        return
    telescope, concl = reducer.whd_prods(ctx, ty)
    for decl in telescope:
        if mentions(decl.ty, names):
            raise PositivityError("inductive type occurs to the left of an arrow")
    head, args = decompose_app(concl)
    if not (isinstance(head, Const) and head.name in names):
        raise PositivityError(f"non strictly positive occurrence of {', '.join(names)}")
    if len(args) != nparams + index_counts[head.name]:
        raise PositivityError(f"{head.name} is not fully applied")
    depth = len(ctx) - nparams + len(telescope)
    check_conclusion(concl, names, head.name, nparams, depth)


def check_constructor(
    reducer: Reducer,
    params: Context,
    telescope: list[Decl],
    concl: Term,
    inductive: str,
    names: Collection[str],
    index_counts: dict[str, int],
) -> None:
    """Strict positivity of one constructor ``Π telescope. concl``."""
    nparams = len(params)
    local = tuple(params)
    for decl in telescope:
        check_positive_arg(reducer, local, decl.ty, names, nparams, index_counts)
        local = (*local, decl)
    check_conclusion(concl, names, inductive, nparams, len(telescope))
