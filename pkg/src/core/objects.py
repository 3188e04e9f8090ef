"""Global objects: axioms, definitions, (co)inductive blocks, (co)recursive blocks.

TIER 0: May import from core and the Python stdlib only.

Inside a block, the block's own inductive types and recursive functions are
referenced as ``Const(name)``. Inductive arities and constructor types live in
the context of the homogeneous parameters; recursive bodies and return types
live in the context of their own argument telescope.
"""

from __future__ import annotations

from dataclasses import dataclass

from core.terms import Context, Term


@dataclass(frozen=True)
class Axiom:
    name: str
    ty: Term


@dataclass(frozen=True)
class Definition:
    name: str
    ty: Term
    body: Term


@dataclass(frozen=True)
class Constructor:
    """Constructor ``name : ty`` with ty under the block parameters."""

    name: str
    ty: Term


@dataclass(frozen=True)
class InductiveType:
    """One inductive of a block; arity is ``Π y⃗ : G⃗. s`` under the parameters."""

    name: str
    arity: Term
    constructors: tuple[Constructor, ...]


@dataclass(frozen=True)
class InductiveBlock:
    """Mutual (co)inductive types sharing the homogeneous parameters."""

    params: Context
    types: tuple[InductiveType, ...]
    coinductive: bool = False

    @property
    def homogeneous_arity(self) -> int:
        return len(self.params)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.types)


@dataclass(frozen=True)
class RecFunction:
    """``f (x⃗ : T⃗) : R := body``.

    ``rec_arg`` is the 0-based position of the structurally decreasing
    argument; None asks the kernel to find one. Unused for corecursion.
    """

    name: str
    binders: Context
    return_ty: Term
    body: Term
    rec_arg: int | None = None


@dataclass(frozen=True)
class RecBlock:
    """``let rec`` (or ``let corec``) block of mutually recursive functions."""

    functions: tuple[RecFunction, ...]
    corecursive: bool = False

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.functions)


GlobalObject = Axiom | Definition | InductiveBlock | RecBlock


def object_names(obj: GlobalObject) -> tuple[str, ...]:
    """Every global name an object introduces."""
    if isinstance(obj, InductiveBlock):
        return tuple(
            name for t in obj.types for name in (t.name, *(k.name for k in t.constructors))
        )
    if isinstance(obj, RecBlock):
        return obj.names
    return (obj.name,)
