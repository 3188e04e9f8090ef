"""Refine module - elaboration of external terms with placeholders.

TIER 3: May import from core, lib and kernel.

Exports:
- RefinerState: the (P, S) pair threaded through every judgment
- Unifier / unify: greedy unification with metavariables
- CoercionDB / declare_coercion: the coercion set Δ
- Refiner: infer, force, enforce_type, cast, eat_prods, eat_args
- refine_obj: refinement of global objects
- is_admissible: check that an output only fills holes and adds coercions
"""

from refine.admissible import AdmissibilityChecker, is_admissible
from refine.coercions import (
    FUNCLASS,
    SORT,
    WILDCARD,
    Candidate,
    CoercionDB,
    CoercionEntry,
    Skeleton,
    declare_coercion,
    skeleton,
)
from refine.objects import refine_obj
from refine.refiner import Refined, Refiner, RefinerOptions
from refine.state import RefinerState
from refine.unify import Unifier, delift, unify

__all__ = [
    "FUNCLASS",
    "SORT",
    "WILDCARD",
    "AdmissibilityChecker",
    "Candidate",
    "CoercionDB",
    "CoercionEntry",
    "Refined",
    "Refiner",
    "RefinerOptions",
    "RefinerState",
    "Skeleton",
    "Unifier",
    "declare_coercion",
    "delift",
    "is_admissible",
    "refine_obj",
    "skeleton",
    "unify",
]
