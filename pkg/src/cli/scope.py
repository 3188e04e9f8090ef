"""Name resolution for parsed scripts.

TIER 4: May import from all tiers.

The parser leaves every identifier as a ``Const``. Resolution replaces the
ones bound by an enclosing binder with de Bruijn indices (innermost binding
wins) and checks that the rest name a global of the environment or of the
block being declared.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from core.errors import ScopeError
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
)
from kernel.environment import GlobalEnv


class Scope:
    """Resolves identifiers against an environment plus extra global names.

    Args:
        env: Globals already defined.
        extra: Names introduced by the block under declaration.
    """

    def __init__(self, env: GlobalEnv, extra: Iterable[str] = ()):
        self.env = env
        self.extra = frozenset(extra)

    def is_global(self, name: str) -> bool:
        return name in self.env or name in self.extra

    def resolve(self, t: Term, names: Sequence[str] = ()) -> Term:
        """Resolve t under bound ``names`` (outermost first).

        Raises:
            ScopeError: Unknown identifier or match without inductive.
        """
        return self._resolve(t, list(names))

    def _resolve(self, t: Term, names: list[str]) -> Term:
        match t:
            case Const(name=name):
                for i in range(len(names) - 1, -1, -1):
                    if names[i] == name:
                        return Rel(len(names) - 1 - i, name, span=t.span)
                if not self.is_global(name):
                    raise ScopeError(f"unknown identifier '{name}'", t.span)
                return t
            case App(head=head, args=args):
                return App(
                    self._resolve(head, names),
                    tuple(self._resolve(a, names) for a in args),
                    span=t.span,
                )
            case Lambda(name=name, ty=ty, body=body):
                return Lambda(
                    name, self._resolve(ty, names), self._resolve(body, [*names, name]),
                    span=t.span,
                )
            case Prod(name=name, ty=ty, body=body):
                return Prod(
                    name, self._resolve(ty, names), self._resolve(body, [*names, name]),
                    span=t.span,
                )
            case LetIn(name=name, ty=ty, value=value, body=body):
                return LetIn(
                    name,
                    self._resolve(ty, names),
                    self._resolve(value, names),
                    self._resolve(body, [*names, name]),
                    span=t.span,
                )
            case Meta(index=index, local_subst=local_subst):
                return Meta(
                    index, tuple(self._resolve(a, names) for a in local_subst), span=t.span
                )
            case Match():
                return self._resolve_match(t, names)
        return t

    def _resolve_match(self, m: Match, names: list[str]) -> Match:
        ind = m.ind or self._inductive_of(m)
        if not self.is_global(ind):
            raise ScopeError(f"unknown inductive '{ind}'", m.span)
        branches = []
        for branch in m.branches:
            if not self.is_global(branch.constructor):
                raise ScopeError(f"unknown constructor '{branch.constructor}'", m.span)
            scope = list(names)
            binders = []
            for binder in branch.binders:
                binders.append(Binder(binder.name, self._resolve(binder.ty, scope)))
                scope.append(binder.name)
            branches.append(
                Branch(branch.constructor, tuple(binders), self._resolve(branch.body, scope))
            )
        return Match(
            self._resolve(m.scrutinee, names),
            ind,
            self._resolve(m.return_ty, names),
            tuple(branches),
            span=m.span,
        )

    def _inductive_of(self, m: Match) -> str:
        if not m.branches:
            raise ScopeError("a match without branches needs 'in <inductive>'", m.span)
        constructor = m.branches[0].constructor
        if not self.env.is_constructor(constructor):
            raise ScopeError(f"unknown constructor '{constructor}'", m.span)
        return self.env.constructor(constructor).inductive

    def resolve_context(
        self, entries: Context, names: Sequence[str] = ()
    ) -> tuple[Context, list[str]]:
        """Resolve a telescope; returns it with the names it binds appended."""
        scope = list(names)
        resolved: list[Decl | Def] = []
        for entry in entries:
            ty = self._resolve(entry.ty, scope)
            if isinstance(entry, Def):
                resolved.append(Def(entry.name, self._resolve(entry.value, scope), ty))
            else:
                resolved.append(Decl(entry.name, ty))
            scope.append(entry.name)
        return tuple(resolved), scope


def resolve_term(env: GlobalEnv, t: Term) -> Term:
    """Resolve a closed external term."""
    return Scope(env).resolve(t)


def resolve_object(env: GlobalEnv, obj: GlobalObject) -> GlobalObject:
    """Resolve every term of an object; block members may refer to each other.

    Raises:
        ScopeError: On the first unknown identifier.
    """
    match obj:
        case Axiom(name=name, ty=ty):
            return Axiom(name, resolve_term(env, ty))
        case Definition(name=name, ty=ty, body=body):
            return Definition(name, resolve_term(env, ty), resolve_term(env, body))
        case InductiveBlock(params=params, types=types, coinductive=coinductive):
            scope = Scope(env, obj.names)
            resolved_params, names = scope.resolve_context(params)
            return InductiveBlock(
                resolved_params,
                tuple(
                    InductiveType(
                        ind.name,
                        scope.resolve(ind.arity, names),
                        tuple(
                            Constructor(k.name, scope.resolve(k.ty, names))
                            for k in ind.constructors
                        ),
                    )
                    for ind in types
                ),
                coinductive,
            )
        case RecBlock(functions=functions, corecursive=corecursive):
            scope = Scope(env, obj.names)
            resolved = []
            for f in functions:
                binders, names = scope.resolve_context(f.binders)
                resolved.append(
                    RecFunction(
                        f.name,
                        binders,
                        scope.resolve(f.return_ty, names),
                        scope.resolve(f.body, names),
                        f.rec_arg,
                    )
                )
            return RecBlock(tuple(resolved), corecursive)
    raise TypeError(f"not an object: {obj!r}")


__all__ = ["Scope", "resolve_object", "resolve_term"]
