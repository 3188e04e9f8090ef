"""Core enums.

TIER 0: No internal imports, only Python stdlib.
"""

from enum import Enum


class ConvMode(str, Enum):
    """Conversion and unification modes.

    CUMULATIVE allows Prop ≤ Type(u) and Type(u) ≤ Type(v) when u ≤ v;
    EXACT requires the universe relation in both directions.
    """

    CUMULATIVE = "cumulative"
    EXACT = "exact"

    def is_exact(self) -> bool:
        """Check if universe cumulativity is disabled."""
        return self == ConvMode.EXACT


class Role(str, Enum):
    """Role of a name in the global environment."""

    DEFINITION = "definition"
    AXIOM = "axiom"
    INDUCTIVE = "inductive"
    CONSTRUCTOR = "constructor"
    FIX = "fix"
    COFIX = "cofix"

    def is_recursive(self) -> bool:
        """Check if the name is a (co)recursive function."""
        return self in (Role.FIX, Role.COFIX)

    def is_unfoldable(self) -> bool:
        """Check if δ-reduction may unfold the name."""
        return self == Role.DEFINITION


class ExitCode(int, Enum):
    """Exit codes of the ``refine`` command."""

    OK = 0
    REFINE_FAILURE = 1
    PARSE_FAILURE = 2
    INTERNAL = 3


class CommandKind(str, Enum):
    """Surface script commands."""

    AXIOM = "axiom"
    DEFINITION = "definition"
    INDUCTIVE = "inductive"
    LETREC = "letrec"
    COERCION = "coercion"
    CHECK = "check"
    UNIVERSE = "universe"
    CONSTRAINT = "constraint"
    META = "meta"

    def is_object(self) -> bool:
        """Check if the command adds an object to the environment."""
        return self in (
            CommandKind.AXIOM,
            CommandKind.DEFINITION,
            CommandKind.INDUCTIVE,
            CommandKind.LETREC,
        )


# Universe name reserved for the sort above every declared one
TOP_UNIVERSE = "top"
