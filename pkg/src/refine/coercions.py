"""Coercion database Δ: declaration, composite closure and lookup.

TIER 3: May import from core, lib and kernel.

A coercion is a constant c together with the 1-based position k of the
argument it coerces. Entries are indexed by the first-order skeletons of
their source (the k-th domain) and target (the type after n arguments), and
the database is kept transitively closed: declaring a coercion also declares
every well-typed composite with the entries already present.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from core.debruijn import abstract, instantiate, lift
from core.errors import CoercionDeclarationError, KernelError, UnificationError
from core.metas import identity_subst, metas_of
from core.objects import Definition
from core.terms import (
    App,
    Const,
    Context,
    Decl,
    Meta,
    Prod,
    Sort,
    Term,
    decompose_app,
    mk_app,
    mk_lambdas,
    mk_prods,
)
from core.types import ConvMode
from kernel.environment import GlobalEnv
from kernel.reduction import Reducer
from lib import config
from lib.logger import get_logger
from refine.state import RefinerState
from refine.unify import Unifier

logger = get_logger("coercions")

COMPOSITE_SEPARATOR = "__o__"


# Skeletons


@dataclass(frozen=True)
class Skeleton:
    """First-order shape of a type: constant heads with children.

    ``_`` matches anything. ``SORT`` stands for any sort and ``FUNCLASS``
    for any product.
    """

    head: str
    children: tuple[Skeleton, ...] = ()

    @property
    def is_wildcard(self) -> bool:
        return self.head == WILDCARD.head

    def matches(self, other: Skeleton) -> bool:
        if self.is_wildcard or other.is_wildcard:
            return True
        if self.head != other.head or len(self.children) != len(other.children):
            return False
        return all(a.matches(b) for a, b in zip(self.children, other.children, strict=True))

    def __str__(self) -> str:
        if not self.children:
            return self.head
        parts = [str(c) if not c.children else f"({c})" for c in self.children]
        return f"{self.head} {' '.join(parts)}"


WILDCARD = Skeleton("_")
SORT = Skeleton("SORT")
FUNCLASS = Skeleton("FUNCLASS")


def skeleton(t: Term) -> Skeleton:
    """Drop bound variables, metavariables and higher-order subterms of t."""
    match t:
        case Sort():
            return SORT
        case Prod():
            return FUNCLASS
        case Const(name=name):
            return Skeleton(name)
        case App(head=Const(name=name), args=args):
            return Skeleton(name, tuple(skeleton(a) for a in args))
    return WILDCARD


# Database


@dataclass(frozen=True)
class CoercionEntry:
    """``(const, k)`` applied to n arguments, ordered by priority then declaration."""

    const: str
    k: int
    priority: int
    n: int
    source: Skeleton
    target: Skeleton
    order: int = 0

    def describe(self) -> str:
        return f"{self.const} (k={self.k}, n={self.n}) : {self.source} >-> {self.target}"


@dataclass(frozen=True)
class Candidate:
    """One lookup result: ``const ?1 ... ?n : result_ty`` with ``?k`` the coerced slot."""

    entry: CoercionEntry
    term: Term
    slot: Meta
    result_ty: Term
    state: RefinerState


@dataclass(frozen=True)
class CoercionDB:
    """Immutable coercion set Δ."""

    entries: tuple[CoercionEntry, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: object) -> bool:
        return any((e.const, e.k) == key for e in self.entries)

    def ordered(self) -> list[CoercionEntry]:
        """Entries by priority (highest first), ties in declaration order."""
        return sorted(self.entries, key=lambda e: (-e.priority, e.order))

    def with_entry(self, entry: CoercionEntry) -> CoercionDB:
        placed = CoercionEntry(
            entry.const,
            entry.k,
            entry.priority,
            entry.n,
            entry.source,
            entry.target,
            len(self.entries),
        )
        return CoercionDB((*self.entries, placed))

    # Lookup

    def lookup(
        self,
        env: GlobalEnv,
        st: RefinerState,
        ctx: Context,
        source_ty: Term,
        target_ty: Term | None = None,
        target: Skeleton | None = None,
    ) -> list[Candidate]:
        """Candidates coercing from source_ty to target_ty (or to a skeleton).

        Existing metavariables are never instantiated; each candidate carries
        its own extension of st with the fresh argument metavariables.
        """
        reducer = Reducer(env, st.subst)
        sources = _skeletons(reducer, ctx, st.instantiate(source_ty))
        if target is not None:
            targets = [target]
        else:
            assert target_ty is not None
            targets = _skeletons(reducer, ctx, st.instantiate(target_ty))
        found = []
        for entry in self.ordered():
            if not any(entry.source.matches(s) for s in sources):
                continue
            if not any(entry.target.matches(t) for t in targets):
                continue
            if target in (SORT, FUNCLASS) and entry.target != target:
                continue
            candidate = _apply_entry(env, st, ctx, entry)
            if candidate is not None:
                found.append(candidate)
        return found


def _skeletons(reducer: Reducer, ctx: Context, t: Term) -> list[Skeleton]:
    """Skeletons of t before and after unfolding the head definition."""
    folded = reducer.whd(ctx, t, delta=False)
    unfolded = reducer.whd(ctx, folded)
    if unfolded == folded:
        return [skeleton(folded)]
    return [skeleton(folded), skeleton(unfolded)]


def _apply_metas(
    env: GlobalEnv, st: RefinerState, ctx: Context, const: str, n: int
) -> tuple[list[Meta], Term, RefinerState] | None:
    """``const ?1 ... ?n`` with fresh metas typed along const's products."""
    reducer = Reducer(env, st.subst)
    ty = env.lookup_type(const)
    metas: list[Meta] = []
    for _ in range(n):
        w = reducer.whd(ctx, ty)
        if not isinstance(w, Prod):
            return None
        meta, st = st.fresh_meta(ctx, w.ty)
        metas.append(meta)
        ty = instantiate(w.body, [meta])
    return metas, ty, st


def _apply_entry(
    env: GlobalEnv, st: RefinerState, ctx: Context, entry: CoercionEntry
) -> Candidate | None:
    applied = _apply_metas(env, st, ctx, entry.const, entry.n)
    if applied is None:
        return None
    metas, result_ty, st = applied
    term = mk_app(Const(entry.const), metas)
    return Candidate(entry, term, metas[entry.k - 1], result_ty, st)


# Declaration


def _spine(reducer: Reducer, ty: Term) -> tuple[list[Decl], Term]:
    """Peel every product of a closed type, unfolding definitions only when needed."""
    telescope: list[Decl] = []
    while True:
        ctx = tuple(telescope)
        w = reducer.whd(ctx, ty, delta=False)
        if not isinstance(w, Prod):
            w = reducer.whd(ctx, w)
            if not isinstance(w, Prod):
                return telescope, ty
        telescope.append(Decl(w.name, w.ty))
        ty = w.body


def make_entry(
    env: GlobalEnv,
    const: str,
    k: int,
    priority: int = 0,
    source: Skeleton | None = None,
    arity: int | None = None,
) -> CoercionEntry:
    """Compute the skeletons of ``(const, k)``.

    Raises:
        CoercionDeclarationError: Unknown constant, k or arity out of range.
    """
    if const not in env:
        raise CoercionDeclarationError(f"unknown constant '{const}'")
    reducer = Reducer(env)
    telescope, concl = _spine(reducer, env.lookup_type(const))
    full = len(telescope)
    if not 1 <= k <= full:
        raise CoercionDeclarationError(
            f"{const} takes {full} arguments; cannot coerce argument {k}"
        )
    n = full if arity is None else arity
    if not k <= n <= full:
        raise CoercionDeclarationError(f"arity {n} of {const} must lie between {k} and {full}")
    if n < full:
        target = FUNCLASS
    else:
        target = skeleton(reducer.whd(tuple(telescope), concl, delta=False))
    source_skel = source or skeleton(
        reducer.whd(tuple(telescope[: k - 1]), telescope[k - 1].ty, delta=False)
    )
    return CoercionEntry(const, k, priority, n, source_skel, target)


def declare_coercion(
    db: CoercionDB,
    env: GlobalEnv,
    const: str,
    k: int,
    priority: int = 0,
    source: Skeleton | None = None,
    arity: int | None = None,
) -> tuple[CoercionDB, GlobalEnv]:
    """Add ``(const, k)`` and its composites with the existing entries.

    Composites are new definitions added to the environment; compositions
    that fail to typecheck are skipped.

    Raises:
        CoercionDeclarationError: Unknown constant, k or arity out of range.
    """
    entry = make_entry(env, const, k, priority, source, arity)
    if (const, k) in db:
        logger.debug(f"coercion {const} (k={k}) already declared")
        return db, env

    if config.get("coercions.warn_overlap", True):
        for other in db.entries:
            if other.source == entry.source and other.target == entry.target:
                logger.warning(f"overlapping coercions: {other.const} and {const}")

    existing = list(db.entries)
    db = db.with_entry(entry)
    left: list[CoercionEntry] = []
    for outer in existing:
        env, composite = _compose(env, outer, entry)
        if composite is not None:
            db = db.with_entry(composite)
            left.append(composite)
    for inner in existing:
        env, composite = _compose(env, entry, inner)
        if composite is not None:
            db = db.with_entry(composite)
    for outer in left:
        for inner in existing:
            env, composite = _compose(env, outer, inner)
            if composite is not None:
                db = db.with_entry(composite)
    logger.debug(f"coercion {entry.describe()} declared; |Δ|={len(db)}")
    return db, env


def _compose(
    env: GlobalEnv, outer: CoercionEntry, inner: CoercionEntry
) -> tuple[GlobalEnv, CoercionEntry | None]:
    """Build ``outer ∘ inner`` as a definition, or None when ill-typed."""
    if not outer.source.matches(inner.target) or outer.target in (SORT, FUNCLASS):
        return env, None
    name = f"{outer.const}{COMPOSITE_SEPARATOR}{inner.const}"
    if name in env:
        return env, None

    reducer = Reducer(env)
    telescope, inner_ty = reducer.whd_prods((), env.lookup_type(inner.const), inner.n)
    ctx: Context = tuple(telescope)
    inner_app = mk_app(Const(inner.const), list(identity_subst(ctx)))

    st = RefinerState()
    try:
        applied = _apply_metas(env, st, ctx, outer.const, outer.n)
        if applied is None:
            return env, None
        metas, result_ty, st = applied
        st = Unifier(env).unify(st, ctx, metas[outer.k - 1], inner_app, ConvMode.EXACT)
    except (UnificationError, KernelError):
        return env, None

    body = st.instantiate(mk_app(Const(outer.const), metas))
    ty = st.instantiate(result_ty)
    open_metas = [m.index for m in metas if st.is_open(m.index)]
    extra: list[Decl] = []
    for position, index in enumerate(open_metas):
        # Earlier open metas become the binders added before this one
        decl_ty = _close_over(st.instantiate(st.problem[index].ty), open_metas[:position], ctx)
        extra.append(Decl(f"x{position + 1}", decl_ty))
    body = _close_over(body, open_metas, ctx)
    ty = _close_over(ty, open_metas, ctx)
    if metas_of(body) or metas_of(ty) or any(metas_of(d.ty) for d in extra):
        return env, None

    definition = Definition(
        name,
        mk_prods([*telescope, *extra], ty),
        mk_lambdas([*telescope, *extra], body),
    )
    try:
        env = env.add_object(definition)
    except KernelError as e:
        logger.debug(f"composite {name} skipped: {e}")
        return env, None
    entry = make_entry(
        env,
        name,
        inner.k,
        min(outer.priority, inner.priority),
        arity=len(telescope) + len(extra),
    )
    logger.debug(f"composite {entry.describe()}")
    return env, entry


def _close_over(t: Term, indices: list[int], ctx: Context) -> Term:
    """Abstract the given metavariables of t, in order, as fresh innermost variables."""
    for position, index in enumerate(indices):
        t = abstract(t, lift(Meta(index, identity_subst(ctx)), position))
    return t


def coerced_argument(t: Term, entry: CoercionEntry) -> Term | None:
    """The k-th argument of an application of entry's constant, if t is one."""
    head, args = decompose_app(t)
    if head == Const(entry.const) and len(args) >= entry.k:
        return args[entry.k - 1]
    return None


__all__ = [
    "FUNCLASS",
    "SORT",
    "WILDCARD",
    "Candidate",
    "CoercionDB",
    "CoercionEntry",
    "Skeleton",
    "declare_coercion",
    "make_entry",
    "skeleton",
]
