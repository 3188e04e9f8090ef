"""De Bruijn operations: lifting, instantiation, substitution, abstraction.

TIER 0: May import from core and the Python stdlib only.

All operations act on internal terms and raise PlaceholderError on external
nodes. Metavariable occurrences are traversed through their local
substitutions, which is how substitution extends to metavariables.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

from core.errors import PlaceholderError
from core.terms import (
    App,
    Binder,
    Branch,
    Const,
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
)

RelHook = Callable[[Rel, int], Term]


def map_rels(t: Term, on_rel: RelHook, depth: int = 0) -> Term:
    """Rebuild t, replacing each variable via ``on_rel(rel, binder_depth)``."""
    match t:
        case Rel():
            return on_rel(t, depth)
        case Const() | Sort():
            return t
        case App(head=head, args=args):
            return App(
                map_rels(head, on_rel, depth),
                tuple(map_rels(a, on_rel, depth) for a in args),
                span=t.span,
            )
        case Lambda(name=name, ty=ty, body=body):
            return Lambda(
                name, map_rels(ty, on_rel, depth), map_rels(body, on_rel, depth + 1), span=t.span
            )
        case Prod(name=name, ty=ty, body=body):
            return Prod(
                name, map_rels(ty, on_rel, depth), map_rels(body, on_rel, depth + 1), span=t.span
            )
        case LetIn(name=name, ty=ty, value=value, body=body):
            return LetIn(
                name,
                map_rels(ty, on_rel, depth),
                map_rels(value, on_rel, depth),
                map_rels(body, on_rel, depth + 1),
                span=t.span,
            )
        case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
            return Match(
                map_rels(scrutinee, on_rel, depth),
                ind,
                map_rels(return_ty, on_rel, depth),
                tuple(_map_branch(b, on_rel, depth) for b in branches),
                span=t.span,
            )
        case Meta(index=index, local_subst=local_subst):
            return Meta(index, tuple(map_rels(s, on_rel, depth) for s in local_subst), span=t.span)
        case Placeholder() | PlaceholderVec():
            raise PlaceholderError("substitution is not defined on placeholders")
    raise TypeError(f"not a term: {t!r}")


def _map_branch(branch: Branch, on_rel: RelHook, depth: int) -> Branch:
    binders = tuple(
        Binder(b.name, map_rels(b.ty, on_rel, depth + i)) for i, b in enumerate(branch.binders)
    )
    body = map_rels(branch.body, on_rel, depth + len(branch.binders))
    return Branch(branch.constructor, binders, body)


def lift(t: Term, n: int, cutoff: int = 0) -> Term:
    """Shift free variables with index >= cutoff by n."""
    if n == 0:
        return t

    def on_rel(rel: Rel, depth: int) -> Term:
        if rel.index >= cutoff + depth:
            return Rel(rel.index + n, rel.name, span=rel.span)
        return rel

    return map_rels(t, on_rel)


def instantiate(t: Term, values: Sequence[Term]) -> Term:
    """Substitute the n innermost free variables of t.

    ``values`` is given outermost first, so ``values[-1]`` replaces Rel(0).
    Remaining free variables are shifted down by n.
    """
    n = len(values)
    if n == 0:
        return t

    def on_rel(rel: Rel, depth: int) -> Term:
        i = rel.index
        if i < depth:
            return rel
        if i - depth < n:
            return lift(values[n - 1 - (i - depth)], depth)
        return Rel(i - n, rel.name, span=rel.span)

    return map_rels(t, on_rel)


def subst(t: Term, u: Term, index: int = 0) -> Term:
    """Capture-avoiding ``t[x/u]`` where x is the variable Rel(index) of t.

    u lives in the context outside x; variables above x shift down by one.
    """

    def on_rel(rel: Rel, depth: int) -> Term:
        i = rel.index
        if i < depth + index:
            return rel
        if i == depth + index:
            return lift(u, depth + index)
        return Rel(i - 1, rel.name, span=rel.span)

    return map_rels(t, on_rel)


def abstract(t: Term, target: Term) -> Term:
    """Replace occurrences of target in t by a new innermost variable.

    The result lives one binder deeper than t. Occurrences are recognized by
    alpha-equality with target lifted to the current depth.
    """
    shifted = lift(t, 1)
    lifted_targets: dict[int, Term] = {}

    def target_at(depth: int) -> Term:
        if depth not in lifted_targets:
            lifted_targets[depth] = lift(target, 1 + depth)
        return lifted_targets[depth]

    return _replace(shifted, target_at, 0)


def _replace(t: Term, target_at: Callable[[int], Term], depth: int) -> Term:
    if t == target_at(depth):
        return Rel(depth, "x")
    match t:
        case Rel() | Const() | Sort():
            return t
        case App(head=head, args=args):
            return App(
                _replace(head, target_at, depth),
                tuple(_replace(a, target_at, depth) for a in args),
                span=t.span,
            )
        case Lambda(name=name, ty=ty, body=body):
            return Lambda(
                name, _replace(ty, target_at, depth), _replace(body, target_at, depth + 1)
            )
        case Prod(name=name, ty=ty, body=body):
            return Prod(name, _replace(ty, target_at, depth), _replace(body, target_at, depth + 1))
        case LetIn(name=name, ty=ty, value=value, body=body):
            return LetIn(
                name,
                _replace(ty, target_at, depth),
                _replace(value, target_at, depth),
                _replace(body, target_at, depth + 1),
            )
        case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
            new_branches = []
            for b in branches:
                binders = tuple(
                    Binder(x.name, _replace(x.ty, target_at, depth + i))
                    for i, x in enumerate(b.binders)
                )
                body = _replace(b.body, target_at, depth + len(b.binders))
                new_branches.append(Branch(b.constructor, binders, body))
            return Match(
                _replace(scrutinee, target_at, depth),
                ind,
                _replace(return_ty, target_at, depth),
                tuple(new_branches),
            )
        case Meta(index=index, local_subst=local_subst):
            return Meta(index, tuple(_replace(s, target_at, depth) for s in local_subst))
    raise PlaceholderError("abstraction is not defined on placeholders")


def free_rels(t: Term) -> set[int]:
    """Indices of the free variables of t. Placeholders are skipped."""
    found: set[int] = set()
    _collect_rels(t, 0, found)
    return found


def _collect_rels(t: Term, depth: int, found: set[int]) -> None:
    match t:
        case Rel(index=index):
            if index >= depth:
                found.add(index - depth)
        case Lambda(ty=ty, body=body) | Prod(ty=ty, body=body):
            _collect_rels(ty, depth, found)
            _collect_rels(body, depth + 1, found)
        case LetIn(ty=ty, value=value, body=body):
            _collect_rels(ty, depth, found)
            _collect_rels(value, depth, found)
            _collect_rels(body, depth + 1, found)
        case Match(scrutinee=scrutinee, return_ty=return_ty, branches=branches):
            _collect_rels(scrutinee, depth, found)
            _collect_rels(return_ty, depth, found)
            for b in branches:
                for i, x in enumerate(b.binders):
                    _collect_rels(x.ty, depth + i, found)
                _collect_rels(b.body, depth + len(b.binders), found)
        case App(head=head, args=args):
            _collect_rels(head, depth, found)
            for a in args:
                _collect_rels(a, depth, found)
        case Meta(local_subst=local_subst):
            for a in local_subst:
                _collect_rels(a, depth, found)


def occurs_rel(t: Term, index: int) -> bool:
    """Check whether the free variable Rel(index) occurs in t."""
    return index in free_rels(t)
