"""Canonical pretty printer for terms, contexts and proof problems.

TIER 0: May import from core and the Python stdlib only.

Output is deterministic and re-parses to an alpha-equal term.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from core.debruijn import occurs_rel
from core.metas import MetaDecl, MetaDef
from core.terms import (
    App,
    Const,
    Context,
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
)

# Precedence levels
_BINDER = 0
_ARROW = 1
_APP = 2
_ATOM = 3


class Printer:
    """Prints terms with binder names made unique along each path.

    Args:
        renumber: Optional map from metavariable index to displayed index.
    """

    def __init__(self, renumber: Mapping[int, int] | None = None):
        self.renumber = renumber or {}

    def term(self, t: Term, names: Sequence[str] = ()) -> str:
        return self._print(t, list(names), _BINDER)

    def context(self, ctx: Context) -> tuple[str, list[str]]:
        """Print a context; also returns the names chosen for its entries."""
        names: list[str] = []
        parts = []
        for entry in ctx:
            name = self._fresh(entry.name, names)
            ty = self._print(entry.ty, names, _BINDER)
            if isinstance(entry, Def):
                value = self._print(entry.value, names, _BINDER)
                parts.append(f"{name} : {ty} := {value}")
            else:
                parts.append(f"{name} : {ty}")
            names.append(name)
        return "; ".join(parts), names

    def meta_decl(self, index: int, decl: MetaDecl) -> str:
        ctx, names = self.context(decl.context)
        ty = self._print(decl.ty, names, _BINDER)
        return f"{ctx} ⊢ {self._meta_name(index)} : {ty}".lstrip()

    def meta_def(self, index: int, assignment: MetaDef) -> str:
        ctx, names = self.context(assignment.context)
        body = self._print(assignment.body, names, _BINDER)
        ty = self._print(assignment.ty, names, _BINDER)
        return f"{ctx} ⊢ {self._meta_name(index)} := {body} : {ty}".lstrip()

    def _meta_name(self, index: int) -> str:
        return f"?{self.renumber.get(index, index)}"

    @staticmethod
    def _fresh(name: str, names: Sequence[str]) -> str:
        base = name if name and name != "_" else "x"
        if base not in names:
            return base
        i = 0
        while f"{base}{i}" in names:
            i += 1
        return f"{base}{i}"

    def _binder_name(self, name: str, names: list[str], body: Term) -> str:
        if name == "_" and not occurs_rel(body, 0):
            return "_"
        return self._fresh(name, names)

    def _print(self, t: Term, names: list[str], level: int) -> str:
        match t:
            case Rel(index=index):
                if index < len(names):
                    return names[len(names) - 1 - index]
                return f"#{index}"
            case Const(name=name):
                return name
            case Sort(universe=None):
                return "Prop"
            case Sort(universe="0"):
                return "Type"
            case Sort(universe=universe):
                return f"Type({universe})"
            case Placeholder():
                return "?"
            case PlaceholderVec():
                return "..."
            case Meta(index=index, local_subst=local_subst):
                if not local_subst:
                    return self._meta_name(index)
                inner = "; ".join(self._print(a, names, _BINDER) for a in local_subst)
                return f"{self._meta_name(index)}[{inner}]"
            case App(head=head, args=args):
                parts = [self._print(head, names, _ATOM)]
                parts.extend(self._print(a, names, _ATOM) for a in args)
                return self._paren(" ".join(parts), level > _APP)
            case Prod(name=name, ty=ty, body=body) if not occurs_rel(body, 0):
                dom = self._print(ty, names, _APP)
                cod = self._print(body, [*names, "_"], _ARROW)
                return self._paren(f"{dom} -> {cod}", level > _ARROW)
            case Prod(name=name, ty=ty, body=body):
                x = self._binder_name(name, names, body)
                text = f"forall {x} : {self._print(ty, names, _BINDER)}, " + self._print(
                    body, [*names, x], _BINDER
                )
                return self._paren(text, level > _BINDER)
            case Lambda(name=name, ty=ty, body=body):
                x = self._binder_name(name, names, body)
                text = f"fun {x} : {self._print(ty, names, _BINDER)} => " + self._print(
                    body, [*names, x], _BINDER
                )
                return self._paren(text, level > _BINDER)
            case LetIn(name=name, ty=ty, value=value, body=body):
                x = self._binder_name(name, names, body)
                text = (
                    f"let {x} : {self._print(ty, names, _BINDER)} := "
                    f"{self._print(value, names, _BINDER)} in "
                    + self._print(body, [*names, x], _BINDER)
                )
                return self._paren(text, level > _BINDER)
            case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
                parts = [
                    f"match {self._print(scrutinee, names, _BINDER)} in {ind} "
                    f"return {self._print(return_ty, names, _BINDER)} with"
                ]
                for branch in branches:
                    scope = list(names)
                    pattern = [branch.constructor]
                    for binder in branch.binders:
                        x = self._fresh(binder.name, scope)
                        pattern.append(f"({x} : {self._print(binder.ty, scope, _BINDER)})")
                        scope.append(x)
                    body = self._print(branch.body, scope, _BINDER)
                    parts.append(f"| {' '.join(pattern)} => {body}")
                parts.append("end")
                return " ".join(parts)
        raise TypeError(f"not a term: {t!r}")

    @staticmethod
    def _paren(text: str, wrap: bool) -> str:
        return f"({text})" if wrap else text


_DEFAULT = Printer()


def pretty(t: Term, names: Sequence[str] = ()) -> str:
    """Print a term whose free variables are named by ``names`` (outermost first)."""
    return _DEFAULT.term(t, names)


def pretty_context(ctx: Context) -> str:
    return _DEFAULT.context(ctx)[0]
