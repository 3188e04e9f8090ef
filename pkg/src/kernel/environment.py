"""Global environment of checked objects.

TIER 2: May import from core and lib.

GlobalEnv is an immutable value. ``add_object`` runs the kernel formation
rules and returns an extended environment; lookups on names present before
an addition are unaffected by it.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from core.errors import DuplicateNameError, KernelError, UniverseError, UnknownConstantError
from core.objects import (
    Axiom,
    Definition,
    GlobalObject,
    InductiveBlock,
    RecBlock,
    object_names,
)
from core.terms import Prod, Sort, Term, mk_lambdas, mk_prods
from core.types import Role
from kernel.universes import UniverseGraph


@dataclass(frozen=True)
class IndInfo:
    """Derived data for one inductive type."""

    name: str
    block: InductiveBlock
    position: int
    arity: Term  # under the parameters
    sort: Sort | None  # conclusion of the arity
    index_count: int
    constructors: tuple[str, ...]

    @property
    def homogeneous_arity(self) -> int:
        return self.block.homogeneous_arity

    @property
    def coinductive(self) -> bool:
        return self.block.coinductive

    @property
    def family(self) -> tuple[str, ...]:
        """Names of the inductives of the same block."""
        return self.block.names


@dataclass(frozen=True)
class ConstructorInfo:
    """Derived data for one constructor."""

    name: str
    inductive: str
    index: int
    ty: Term  # under the parameters
    arg_count: int


@dataclass(frozen=True)
class FixInfo:
    """Derived data for one (co)recursive function."""

    name: str
    block: RecBlock
    position: int
    ty: Term
    body: Term | None  # λ-closed body; None while the block is being checked
    rec_arg: int | None
    arity: int

    @property
    def corecursive(self) -> bool:
        return self.block.corecursive


@dataclass(frozen=True)
class _Entry:
    role: Role
    ty: Term
    body: Term | None = None


class GlobalEnv:
    """Ordered map name -> object, plus per-name role and type."""

    def __init__(self, universes: UniverseGraph | None = None):
        self.universes = universes or UniverseGraph()
        self._entries: dict[str, _Entry] = {}
        self._inductives: dict[str, IndInfo] = {}
        self._constructors: dict[str, ConstructorInfo] = {}
        self._fixes: dict[str, FixInfo] = {}
        self._objects: tuple[GlobalObject, ...] = ()

    def _copy(self) -> GlobalEnv:
        env = GlobalEnv(self.universes)
        env._entries = dict(self._entries)
        env._inductives = dict(self._inductives)
        env._constructors = dict(self._constructors)
        env._fixes = dict(self._fixes)
        env._objects = self._objects
        return env

    # Lookups

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    @property
    def objects(self) -> tuple[GlobalObject, ...]:
        return self._objects

    def lookup_type(self, name: str) -> Term:
        """Type of a global name, closed over the homogeneous parameters."""
        return self._entry(name).ty

    def role(self, name: str) -> Role:
        return self._entry(name).role

    def definition_body(self, name: str) -> Term | None:
        return self._entry(name).body

    def inductive(self, name: str) -> IndInfo:
        if name not in self._inductives:
            raise KernelError(f"'{name}' is not an inductive type")
        return self._inductives[name]

    def constructor(self, name: str) -> ConstructorInfo:
        if name not in self._constructors:
            raise KernelError(f"'{name}' is not a constructor")
        return self._constructors[name]

    def fixpoint(self, name: str) -> FixInfo:
        if name not in self._fixes:
            raise KernelError(f"'{name}' is not a recursive function")
        return self._fixes[name]

    def is_inductive(self, name: str) -> bool:
        return name in self._inductives

    def is_constructor(self, name: str) -> bool:
        return name in self._constructors

    def is_fixpoint(self, name: str) -> bool:
        return name in self._fixes

    def _entry(self, name: str) -> _Entry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownConstantError(name) from None

    # Extension

    def add_object(self, obj: GlobalObject) -> GlobalEnv:
        """Kernel-check ``obj`` with empty P and S and return the extended env.

        Raises:
            KernelError: On any formation rule violation; self is unchanged.
        """
        from kernel.formation import typecheck_obj

        checked = typecheck_obj(self, obj)
        return self.extend(checked)

    def extend(self, obj: GlobalObject) -> GlobalEnv:
        """Record an already checked object."""
        self.check_fresh(obj)
        env = self._copy()
        env._objects = (*self._objects, obj)
        match obj:
            case Axiom(name=name, ty=ty):
                env._entries[name] = _Entry(Role.AXIOM, ty)
            case Definition(name=name, ty=ty, body=body):
                env._entries[name] = _Entry(Role.DEFINITION, ty, body)
            case InductiveBlock():
                env._record_inductives(obj, with_constructors=True)
            case RecBlock():
                env._record_functions(obj, with_bodies=True)
        return env

    def with_signatures(self, obj: InductiveBlock | RecBlock) -> GlobalEnv:
        """Environment where a block under check is visible by type only."""
        env = self._copy()
        if isinstance(obj, InductiveBlock):
            env._record_inductives(obj, with_constructors=False)
        else:
            env._record_functions(obj, with_bodies=False)
        return env

    def check_fresh(self, obj: GlobalObject) -> None:
        seen: set[str] = set()
        for name in object_names(obj):
            if name in self._entries or name in seen:
                raise DuplicateNameError(f"name '{name}' is already defined")
            seen.add(name)

    def with_universe(self, name: str) -> GlobalEnv:
        env = self._copy()
        env.universes = self.universes.declare(name)
        return env

    def with_constraint(self, lower: str, upper: str, strict: bool = False) -> GlobalEnv:
        env = self._copy()
        env.universes = self.universes.constrain(lower, upper, strict)
        return env

    def _record_inductives(self, block: InductiveBlock, with_constructors: bool) -> None:
        for position, ind in enumerate(block.types):
            index_count, sort = _arity_conclusion(ind.arity)
            names = tuple(k.name for k in ind.constructors) if with_constructors else ()
            self._inductives[ind.name] = IndInfo(
                ind.name,
                block,
                position,
                ind.arity,
                sort,
                index_count,
                names,
            )
            self._entries[ind.name] = _Entry(Role.INDUCTIVE, mk_prods(block.params, ind.arity))
            if not with_constructors:
                continue
            for index, k in enumerate(ind.constructors):
                self._constructors[k.name] = ConstructorInfo(
                    k.name, ind.name, index, k.ty, _count_prods(k.ty)
                )
                self._entries[k.name] = _Entry(Role.CONSTRUCTOR, mk_prods(block.params, k.ty))

    def _record_functions(self, block: RecBlock, with_bodies: bool) -> None:
        role = Role.COFIX if block.corecursive else Role.FIX
        for position, f in enumerate(block.functions):
            ty = mk_prods(f.binders, f.return_ty)
            body = mk_lambdas(f.binders, f.body) if with_bodies else None
            self._fixes[f.name] = FixInfo(
                f.name, block, position, ty, body, f.rec_arg, len(f.binders)
            )
            self._entries[f.name] = _Entry(role, ty)

    def check_universe(self, level: str) -> None:
        if not self.universes.is_declared(level):
            raise UniverseError(f"undeclared universe '{level}'")


def _arity_conclusion(arity: Term) -> tuple[int, Sort | None]:
    n = 0
    while isinstance(arity, Prod):
        n += 1
        arity = arity.body
    return n, arity if isinstance(arity, Sort) else None


def _count_prods(t: Term) -> int:
    n = 0
    while isinstance(t, Prod):
        n += 1
        t = t.body
    return n
