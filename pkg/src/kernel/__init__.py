"""Kernel module - the trusted type checker.

TIER 2: May import from core and lib.

Exports:
- GlobalEnv: checked objects with type lookup
- Reducer / whd: weak-head reduction
- Converter / convert: conversion, cumulative or exact
- TypeChecker and the typecheck_* judgments
- typecheck_obj: formation of axioms, definitions, (co)inductive and
  (co)recursive blocks
"""

from kernel.conversion import Converter, convert
from kernel.environment import ConstructorInfo, FixInfo, GlobalEnv, IndInfo
from kernel.formation import typecheck_obj
from kernel.reduction import Reducer, beta_head, whd, whd_prods
from kernel.typecheck import (
    TypeChecker,
    elim_allowed,
    typecheck_context,
    typecheck_metasenv,
    typecheck_subst,
    typecheck_term,
)
from kernel.universes import UniverseGraph

__all__ = [
    "ConstructorInfo",
    "Converter",
    "FixInfo",
    "GlobalEnv",
    "IndInfo",
    "Reducer",
    "TypeChecker",
    "UniverseGraph",
    "beta_head",
    "convert",
    "elim_allowed",
    "typecheck_context",
    "typecheck_metasenv",
    "typecheck_obj",
    "typecheck_subst",
    "typecheck_term",
    "whd",
    "whd_prods",
]
