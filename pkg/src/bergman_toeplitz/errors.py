class DomainError(ValueError):
    """Input outside the open unit disk (or too close to its boundary)."""


class UsageError(ValueError):
    """Arguments violate an operation's preconditions."""


class PrecisionError(ArithmeticError):
    """Truncation or quadrature cannot reach the requested tolerance."""


class EvaluationError(ArithmeticError):
    """An integrand produced a non-finite value at a quadrature node."""
