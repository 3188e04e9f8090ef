"""Check that a refined term was obtained from its input by admissible edits.

TIER 3: May import from core, lib and kernel.

The output of the refiner may differ from its input only by:

- a placeholder replaced by any term
- a placeholder vector replaced by any number of arguments
- a subterm u wrapped as ``c a1 ... u ... an`` for a declared coercion c,
  also around the head of a partial application

Assigned metavariables of the output are expanded on demand, so the check
works on terms the substitution has not been applied to.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

from core.debruijn import instantiate
from core.metas import Substitution
from core.terms import (
    App,
    Const,
    Lambda,
    LetIn,
    Match,
    Meta,
    Placeholder,
    PlaceholderVec,
    Prod,
    Term,
    decompose_app,
    mk_app,
)
from refine.coercions import CoercionDB, CoercionEntry, coerced_argument


@dataclass
class AdmissibilityChecker:
    subst: Substitution
    coercions: CoercionDB

    @cached_property
    def _entries(self) -> dict[str, list[CoercionEntry]]:
        by_const: dict[str, list[CoercionEntry]] = {}
        for entry in self.coercions.entries:
            by_const.setdefault(entry.const, []).append(entry)
        return by_const

    def _expand(self, t: Term) -> Term | None:
        """Unfold an assigned metavariable at the head of t."""
        head, args = decompose_app(t)
        if isinstance(head, Meta) and head.index in self.subst:
            body = instantiate(self.subst[head.index].body, head.local_subst)
            return mk_app(body, args)
        return None

    def check(self, source: Term, output: Term) -> bool:
        if isinstance(source, Placeholder):
            return True
        if self._structural(source, output):
            return True
        expanded = self._expand(output)
        if expanded is not None:
            return self.check(source, expanded)
        return any(self.check(source, inner) for inner in self._uncoerced(output))

    def _uncoerced(self, output: Term) -> list[Term]:
        """Terms that ``output`` may be a coercion around."""
        head, args = decompose_app(output)
        if not isinstance(head, Const):
            return []
        found = []
        for entry in self._entries.get(head.name, []):
            inner = coerced_argument(output, entry)
            if inner is not None and len(args) >= entry.n:
                found.append(mk_app(inner, args[entry.n :]))
        return found

    def _structural(self, source: Term, output: Term) -> bool:
        match source, output:
            case Meta(), Meta() if source.index == output.index:
                return len(source.local_subst) == len(output.local_subst) and all(
                    self.check(a, b)
                    for a, b in zip(source.local_subst, output.local_subst, strict=True)
                )
            case App(), _:
                return self._application(source, output)
            case (Lambda(), Lambda()) | (Prod(), Prod()):
                return self.check(source.ty, output.ty) and self.check(source.body, output.body)
            case LetIn(), LetIn():
                return (
                    self.check(source.ty, output.ty)
                    and self.check(source.value, output.value)
                    and self.check(source.body, output.body)
                )
            case Match(), Match():
                if source.ind != output.ind or len(source.branches) != len(output.branches):
                    return False
                if not (
                    self.check(source.scrutinee, output.scrutinee)
                    and self.check(source.return_ty, output.return_ty)
                ):
                    return False
                for a, b in zip(source.branches, output.branches, strict=True):
                    if a.constructor != b.constructor or len(a.binders) != len(b.binders):
                        return False
                    if not all(
                        self.check(x.ty, y.ty) for x, y in zip(a.binders, b.binders, strict=True)
                    ):
                        return False
                    if not self.check(a.body, b.body):
                        return False
                return True
            case (PlaceholderVec(), _) | (_, Placeholder()) | (_, PlaceholderVec()):
                return False
        return source == output

    def _application(self, source: App, output: Term) -> bool:
        head, args = decompose_app(output)
        # Some leading output arguments may belong to the refined head
        for split in range(len(args) + 1):
            if self.check(source.head, mk_app(head, args[:split])) and self._align(
                source.args, args[split:]
            ):
                return True
        return False

    def _align(self, sources: Sequence[Term], outputs: Sequence[Term]) -> bool:
        if not sources:
            return not outputs
        first = sources[0]
        if isinstance(first, PlaceholderVec):
            if self._align(sources[1:], outputs):
                return True
            return bool(outputs) and self._align(sources, outputs[1:])
        return (
            bool(outputs)
            and self.check(first, outputs[0])
            and self._align(sources[1:], outputs[1:])
        )


def is_admissible(
    source: Term, output: Term, subst: Substitution, coercions: CoercionDB | None = None
) -> bool:
    """Whether output arises from source by filling placeholders and inserting coercions."""
    return AdmissibilityChecker(subst, coercions or CoercionDB()).check(source, output)


__all__ = ["AdmissibilityChecker", "is_admissible"]
