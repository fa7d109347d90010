"""Exception types shared across the toolkit."""


class CddError(Exception):
    """Base class for all toolkit errors."""


# --- schema / loading ---------------------------------------------------

class SchemaError(CddError, ValueError):
    """A JSON document does not match the expected schema."""


class UnknownSurfaceReference(SchemaError):
    """A constraint or requirement names a surface the problem does not have."""


class UnsupportedRelation(SchemaError):
    """Only upper bounds (``<=``) are accepted in requirements."""


class InfeasibleSeed(CddError, ValueError):
    """The seed point violates the ambient bounds or an objective constraint."""


class DimensionMismatch(CddError, ValueError):
    """Vector or box length does not match the design-space dimension."""


class BoxOutsideAmbient(CddError, ValueError):
    """A candidate box extends past the ambient bounds."""


class SeedNotContained(CddError, ValueError):
    """The factor interval being expanded does not contain the seed coordinate."""


class InfeasibleInput(CddError, ValueError):
    """An operation requiring a feasible box was given an infeasible one."""


class CapExceeded(CddError, ValueError):
    """A lattice or enumeration request exceeds the configured size cap."""


# --- model theory -------------------------------------------------------

class ParseError(CddError, ValueError):
    """Concrete-syntax error; carries the offset and what was expected."""

    def __init__(self, message, position, expected=None):
        detail = f"{message} at offset {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.position = position
        self.expected = expected


class UnknownSymbol(CddError, ValueError):
    """A predicate or function symbol is not declared in the signature."""


class ArityMismatch(CddError, ValueError):
    """A symbol is applied to the wrong number of arguments."""


class FreeVariable(CddError, ValueError):
    """A sentence was required but the formula has free variables."""


class DomainEmpty(CddError, ValueError):
    """Quantified sentences over an empty domain are rejected, not decided."""


class EvaluationOverflow(CddError, ArithmeticError):
    """Rational arithmetic exceeded the configured magnitude bound."""


class HigherOrderGraph(CddError, ValueError):
    """A conceptual-graph relation node references another relation node."""
