"""Exception hierarchy shared by all modules."""


class DarkBrightError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(DarkBrightError, ValueError):
    """An input violates a documented precondition (bad size, label, norm...)."""


class DimensionError(ValidationError):
    """Array shapes do not agree."""


class PreconditionError(ValidationError):
    """Inputs are well formed but a mathematical precondition fails."""


class DegenerateError(DarkBrightError, ArithmeticError):
    """A quantity the computation divides by vanishes (e.g. zero variance).

    Typically the state in question is an eigenstate of the operator, so the
    bound built from it is undefined.
    """


class PathCountOverflowError(DarkBrightError, OverflowError):
    """Exact integer path counting exceeded the 64-bit range."""
