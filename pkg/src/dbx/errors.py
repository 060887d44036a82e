"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """Input outside the documented domain of an operation."""


class DomainError(PreconditionError):
    """A root solve found no sign change where one was required."""


class NumericError(ArithmeticError):
    """A numeric procedure failed: lost bracket, no convergence, or ambiguity."""
