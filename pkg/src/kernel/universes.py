"""Universe levels and declared constraints.

TIER 2: May import from core and lib.

A level is a declared name with an optional successor offset (``u``,
``u+1``), a numeral (``0``, ``3``) or ``top``. Numerals share the base
``0``, which lies below every declared name. ``top`` lies above every level
and is its own successor.
"""

from __future__ import annotations

import re
from functools import cached_property

from core.errors import UniverseError
from core.types import TOP_UNIVERSE

_LEVEL = re.compile(r"^(?P<base>[A-Za-z_][A-Za-z0-9_']*|\d+)(?:\+(?P<offset>\d+))?$")

BASE = "0"


def parse_level(level: str) -> tuple[str, int]:
    """Split a level into (base name, offset)."""
    m = _LEVEL.match(level)
    if m is None:
        raise UniverseError(f"malformed universe level '{level}'")
    base = m.group("base")
    offset = int(m.group("offset") or 0)
    if base.isdigit():
        return BASE, int(base) + offset
    return base, offset


def format_level(base: str, offset: int) -> str:
    if base == BASE:
        return str(offset)
    return base if offset == 0 else f"{base}+{offset}"


class UniverseGraph:
    """Immutable set of universe names with weighted ≤ edges.

    An edge ``(u, v, w)`` states ``u + w ≤ v``; ``w`` is 1 for a strict
    constraint and 0 otherwise.
    """

    def __init__(
        self,
        names: frozenset[str] = frozenset({BASE}),
        edges: frozenset[tuple[str, str, int]] = frozenset(),
    ):
        self.names = names
        self.edges = edges

    def declare(self, name: str) -> UniverseGraph:
        base, offset = parse_level(name)
        if offset or base == BASE or name == TOP_UNIVERSE:
            raise UniverseError(f"cannot declare universe '{name}'")
        if name in self.names:
            raise UniverseError(f"universe '{name}' already declared")
        return UniverseGraph(self.names | {name}, self.edges | {(BASE, name, 0)})

    def constrain(self, lower: str, upper: str, strict: bool) -> UniverseGraph:
        """Add ``lower ≤ upper`` (or ``<``); rejects inconsistent constraints."""
        lb, lo = parse_level(lower)
        ub, uo = parse_level(upper)
        for b in (lb, ub):
            if b not in self.names:
                raise UniverseError(f"undeclared universe '{b}'")
        # lb + lo + strict ≤ ub + uo  ==>  lb + (lo + strict - uo) ≤ ub
        weight = lo + int(strict) - uo
        graph = UniverseGraph(self.names, self.edges | {(lb, ub, weight)})
        if graph._has_positive_cycle():
            raise UniverseError(f"constraint {lower} {'<' if strict else '<='} {upper} is inconsistent")
        return graph

    def is_declared(self, level: str) -> bool:
        if level == TOP_UNIVERSE:
            return True
        try:
            base, _ = parse_level(level)
        except UniverseError:
            return False
        return base in self.names

    def leq(self, u: str, v: str) -> bool:
        """Check ``u ≤ v`` under the declared constraints."""
        if v == TOP_UNIVERSE:
            return True
        if u == TOP_UNIVERSE:
            return False
        ub, uo = parse_level(u)
        vb, vo = parse_level(v)
        gap = self._longest.get(ub, {}).get(vb)
        return gap is not None and uo <= gap + vo

    def succ(self, u: str) -> str:
        if u == TOP_UNIVERSE:
            return u
        base, offset = parse_level(u)
        return format_level(base, offset + 1)

    def max(self, u: str, v: str) -> str:
        """Least upper bound of two comparable levels."""
        if self.leq(u, v):
            return v
        if self.leq(v, u):
            return u
        raise UniverseError(f"universes {u} and {v} are not comparable")

    @cached_property
    def _longest(self) -> dict[str, dict[str, int]]:
        # Longest-path weights between bases; the graph has no positive cycle.
        result: dict[str, dict[str, int]] = {}
        for source in self.names:
            dist = {source: 0}
            for _ in range(len(self.names)):
                changed = False
                for a, b, w in self.edges:
                    if a in dist and dist[a] + w > dist.get(b, -(10**9)):
                        dist[b] = dist[a] + w
                        changed = True
                if not changed:
                    break
            result[source] = dist
        return result

    def _has_positive_cycle(self) -> bool:
        dist = dict.fromkeys(self.names, 0)
        for _ in range(len(self.names) + 1):
            changed = False
            for a, b, w in self.edges:
                if dist[a] + w > dist[b]:
                    dist[b] = dist[a] + w
                    changed = True
            if not changed:
                return False
        return True
