"""Core module - terms, metavariables, objects, errors, enums.

TIER 0: May import from core and the Python stdlib only.

Exports:
- Terms: Term and its node classes, contexts, mk_app, mk_prods, mk_lambdas
- De Bruijn: lift, instantiate, subst, abstract, free_rels
- Metavariables: ProofProblem, Substitution, MetaDecl, MetaDef, apply_subst,
  metas_of, check_valid_proof_problem
- Objects: Axiom, Definition, InductiveBlock, RecBlock
- Errors: RefinerToolError and its subclasses
- Enums: ConvMode, Role, ExitCode, CommandKind
"""

from core.debruijn import abstract, free_rels, instantiate, lift, subst
from core.errors import (
    ConfigError,
    FuelExhausted,
    KernelError,
    ParseError,
    RefineError,
    RefinerToolError,
    UnificationError,
)
from core.metas import (
    MetaDecl,
    MetaDef,
    ProofProblem,
    Substitution,
    apply_subst,
    check_valid_proof_problem,
    metas_of,
)
from core.objects import (
    Axiom,
    Constructor,
    Definition,
    InductiveBlock,
    InductiveType,
    RecBlock,
    RecFunction,
)
from core.pretty import Printer, pretty
from core.terms import (
    PROP,
    App,
    Binder,
    Branch,
    Const,
    Decl,
    Def,
    Lambda,
    LetIn,
    Match,
    Meta,
    Placeholder,
    PlaceholderVec,
    Prod,
    Rel,
    Sort,
    Span,
    Term,
    mk_app,
    mk_lambdas,
    mk_prods,
    type_sort,
)
from core.types import CommandKind, ConvMode, ExitCode, Role


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Structural equality up to bound-name renaming."""
    return t1 == t2


__all__ = [
    "PROP",
    "App",
    "Axiom",
    "Binder",
    "Branch",
    "CommandKind",
    "ConfigError",
    "Const",
    "Constructor",
    "ConvMode",
    "Decl",
    "Def",
    "Definition",
    "ExitCode",
    "FuelExhausted",
    "InductiveBlock",
    "InductiveType",
    "KernelError",
    "Lambda",
    "LetIn",
    "Match",
    "Meta",
    "MetaDecl",
    "MetaDef",
    "ParseError",
    "Placeholder",
    "PlaceholderVec",
    "Printer",
    "Prod",
    "ProofProblem",
    "RecBlock",
    "RecFunction",
    "RefineError",
    "RefinerToolError",
    "Rel",
    "Role",
    "Sort",
    "Span",
    "Substitution",
    "Term",
    "UnificationError",
    "abstract",
    "alpha_eq",
    "apply_subst",
    "check_valid_proof_problem",
    "free_rels",
    "instantiate",
    "lift",
    "metas_of",
    "mk_app",
    "mk_lambdas",
    "mk_prods",
    "pretty",
    "subst",
    "type_sort",
]
