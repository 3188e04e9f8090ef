"""Custom exceptions for the refiner.

TIER 0: No internal imports, only Python stdlib.

Every failure raised by the kernel, the refiner or the surface tools derives
from RefinerToolError. Kernel rejections derive from KernelError, elaboration
failures from RefineError.
"""

from __future__ import annotations

from typing import Any


class RefinerToolError(Exception):
    """Base exception for the refiner package."""

    pass


class ConfigError(RefinerToolError):
    """Configuration file could not be read or has a wrong shape."""

    pass


class PlaceholderError(RefinerToolError):
    """An operation reserved for internal terms met a placeholder."""

    pass


class FuelExhausted(RefinerToolError):
    """A reduction or refinement step budget ran out.

    Never raised on well-typed input within the default budget; treated by
    the CLI as an internal error.
    """

    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(f"{what}: step budget of {budget} exhausted")


# Kernel


class KernelError(RefinerToolError):
    """The kernel rejected a term, context, proof problem or object."""

    pass


class UnboundVariableError(KernelError):
    """De Bruijn index out of the context."""

    pass


class UnknownConstantError(KernelError):
    """Constant not present in the global environment."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown constant '{name}'")


class DuplicateNameError(KernelError):
    """Object name already present in the global environment."""

    pass


class UndeclaredMetaError(KernelError):
    """Metavariable neither in the proof problem nor in the substitution."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"undeclared metavariable ?{index}")


class NotASortError(KernelError):
    """A type was expected but the term's type is not a sort."""

    pass


class NotAProductError(KernelError):
    """Application head whose type does not reduce to a product."""

    pass


class ConversionError(KernelError):
    """Two types that had to be convertible are not."""

    def __init__(self, message: str, left: Any = None, right: Any = None):
        self.left = left
        self.right = right
        super().__init__(message)


class EliminationError(KernelError):
    """Pattern matching from a sort into a disallowed sort."""

    pass


class MatchShapeError(KernelError):
    """Match with wrong inductive, branch order, branch count or arity."""

    pass


class PositivityError(KernelError):
    """Inductive block fails the strict positivity condition."""

    pass


class GuardError(KernelError):
    """(Co)recursive block fails the structural guard."""

    pass


class InvalidProofProblemError(KernelError):
    """Metavariable dependency order has a cycle."""

    pass


class UniverseError(KernelError):
    """Undeclared universe or inconsistent universe constraint."""

    pass


# Refiner


class RefineError(RefinerToolError):
    """Elaboration failed.

    Attributes:
        rule: Name of the judgment that failed (e.g. "R⇓-appl-k").
        span: Source span of the offending subterm, or None.
        expected: Expected type, when the failure is a mismatch.
        inferred: Inferred type, when the failure is a mismatch.
    """

    def __init__(
        self,
        message: str,
        rule: str = "",
        span: Any = None,
        expected: Any = None,
        inferred: Any = None,
    ):
        self.rule = rule
        self.span = span
        self.expected = expected
        self.inferred = inferred
        super().__init__(message)


class UnificationError(RefineError):
    """Two terms could not be unified."""

    pass


class CoercionError(RefineError):
    """No declared coercion bridges the inferred and expected types."""

    pass


class ArgumentOverflowError(RefineError):
    """More arguments than products in the head's type."""

    pass


class PlaceholderPositionError(RefineError):
    """Placeholder vector outside an argument position."""

    pass


class ObligationsError(RefineError):
    """An object still has open metavariables after refinement."""

    pass


class CoercionDeclarationError(RefinerToolError):
    """Coercion declared on an unknown constant or with k out of range."""

    pass


# Surface


class ParseError(RefinerToolError):
    """Syntax error in a script."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


class ScopeError(RefinerToolError):
    """Unknown identifier in a script."""

    def __init__(self, message: str, span: Any = None):
        self.span = span
        super().__init__(message)
