"""Refinement of global objects.

TIER 3: May import from core, lib and kernel.

``refine_obj`` elaborates the types and bodies of an external object and
returns it with the substitution applied. Positivity and guardedness are left
to the kernel, which checks the object when it is added to the environment.
Metavariables still open afterwards are the object's proof obligations.
"""

from __future__ import annotations

from core.debruijn import instantiate, lift
from core.errors import KernelError, NotASortError
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
from core.terms import Const, Context, Decl, Def, Prod, Rel, Sort, Term, mk_app, mk_prods
from core.types import ConvMode
from kernel.reduction import Reducer
from lib.logger import get_logger
from refine.refiner import Refiner
from refine.state import RefinerState

logger = get_logger("refiner")


def refine_obj(
    refiner: Refiner, st: RefinerState, obj: GlobalObject
) -> tuple[GlobalObject, RefinerState]:
    """Refine an external object.

    Raises:
        RefineError: The failing rule inside the offending component.
        KernelError: Unknown names, or an arity that does not end in a sort.
    """
    match obj:
        case Axiom(name=name, ty=ty):
            ty2, _, st2 = refiner.enforce_type(st, (), ty)
            result: GlobalObject = Axiom(name, st2.instantiate(ty2))
        case Definition(name=name, ty=ty, body=body):
            ty2, _, st2 = refiner.enforce_type(st, (), ty)
            b = refiner.force(st2, (), body, ty2)
            st2 = b.state
            result = Definition(name, st2.instantiate(ty2), st2.instantiate(b.term))
        case InductiveBlock():
            result, st2 = _refine_inductive(refiner, st, obj)
        case RecBlock():
            result, st2 = _refine_rec(refiner, st, obj)
        case _:
            raise KernelError(f"not an object: {obj!r}")
    obligations = st2.new_metas(st)
    if obligations:
        logger.info(f"{', '.join(_names(result))}: {len(obligations)} open obligation(s)")
    return result, st2


def _names(obj: GlobalObject) -> tuple[str, ...]:
    if isinstance(obj, (InductiveBlock, RecBlock)):
        return obj.names
    return (obj.name,)


def _refine_context(
    refiner: Refiner, st: RefinerState, ctx: Context, entries: Context
) -> tuple[Context, RefinerState]:
    """F on every declared type of a telescope, left to right."""
    local = tuple(ctx)
    refined: list[Decl | Def] = []
    for entry in entries:
        ty, _, st = refiner.enforce_type(st, local, entry.ty)
        if isinstance(entry, Def):
            v = refiner.force(st, local, entry.value, ty)
            st = v.state
            new: Decl | Def = Def(entry.name, v.term, ty)
        else:
            new = Decl(entry.name, ty)
        refined.append(new)
        local = (*local, new)
    return tuple(refined), st


def _refine_inductive(
    refiner: Refiner, st: RefinerState, block: InductiveBlock
) -> tuple[InductiveBlock, RefinerState]:
    params, st = _refine_context(refiner, st, (), block.params)
    l = len(params)

    arities: list[Term] = []
    for ind in block.types:
        arity, _, st = refiner.enforce_type(st, params, ind.arity)
        reducer = Reducer(refiner.env, st.subst)
        telescope, concl = reducer.whd_prods(params, st.instantiate(arity))
        if not isinstance(concl, Sort):
            raise NotASortError(f"arity of {ind.name} must end in a sort")
        arities.append(mk_prods(telescope, concl))

    signature = InductiveBlock(
        st.instantiate_context(params),
        tuple(
            InductiveType(ind.name, st.instantiate(arity), ())
            for ind, arity in zip(block.types, arities, strict=True)
        ),
        block.coinductive,
    )
    inner = refiner.with_env(refiner.env.with_signatures(signature))

    constructors: list[list[Term]] = []
    for ind, arity in zip(block.types, arities, strict=True):
        refined: list[Term] = []
        for k in ind.constructors:
            ty, _, st = inner.enforce_type(st, params, k.ty)
            reducer = Reducer(inner.env, st.subst)
            telescope, concl = reducer.whd_prods(params, st.instantiate(ty))
            n = len(telescope)
            local = (*params, *telescope)

            # Target I x⃗ ?⃗ with the parameters as variables and fresh indices
            indices: list[Term] = []
            rest = lift(st.instantiate(arity), n)
            while True:
                w = reducer.whd(local, rest)
                if not isinstance(w, Prod):
                    break
                meta, st = st.fresh_meta(local, w.ty)
                indices.append(meta)
                rest = instantiate(w.body, [meta])
            target = mk_app(
                Const(ind.name), [*(Rel(n + l - 1 - i) for i in range(l)), *indices]
            )
            st = inner.unify_at(st, local, concl, target, ConvMode.EXACT, "R_O-inductive", k.ty)
            refined.append(ty)
        constructors.append(refined)
    refiner.steps = inner.steps

    result = InductiveBlock(
        st.instantiate_context(params),
        tuple(
            InductiveType(
                ind.name,
                st.instantiate(arity),
                tuple(
                    Constructor(k.name, st.instantiate(ty))
                    for k, ty in zip(ind.constructors, tys, strict=True)
                ),
            )
            for ind, arity, tys in zip(block.types, arities, constructors, strict=True)
        ),
        block.coinductive,
    )
    return result, st


def _refine_rec(
    refiner: Refiner, st: RefinerState, block: RecBlock
) -> tuple[RecBlock, RefinerState]:
    headers: list[tuple[Context, Term]] = []
    for f in block.functions:
        binders, st = _refine_context(refiner, st, (), f.binders)
        ret, _, st = refiner.enforce_type(st, binders, f.return_ty)
        headers.append((binders, ret))

    signature = RecBlock(
        tuple(
            RecFunction(
                f.name,
                st.instantiate_context(binders),
                st.instantiate(ret),
                f.body,
                f.rec_arg,
            )
            for f, (binders, ret) in zip(block.functions, headers, strict=True)
        ),
        block.corecursive,
    )
    inner = refiner.with_env(refiner.env.with_signatures(signature))

    bodies: list[Term] = []
    for f, (binders, ret) in zip(block.functions, headers, strict=True):
        b = inner.force(st, binders, f.body, ret)
        st = b.state
        bodies.append(b.term)
    refiner.steps = inner.steps

    result = RecBlock(
        tuple(
            RecFunction(
                f.name,
                st.instantiate_context(binders),
                st.instantiate(ret),
                st.instantiate(body),
                f.rec_arg,
            )
            for f, (binders, ret), body in zip(block.functions, headers, bodies, strict=True)
        ),
        block.corecursive,
    )
    return result, st


__all__ = ["refine_obj"]
