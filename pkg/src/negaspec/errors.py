"""Exception hierarchy shared by all modules."""


class NegaspecError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(NegaspecError, ValueError):
    """Bad user input: geometry, filling fraction, configuration."""


class DomainError(NegaspecError, ValueError):
    """Argument outside the region where a formula is defined."""


class NumericalError(NegaspecError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy result."""


class ConvergenceError(NumericalError):
    """Iterative solver or quadrature failed to converge."""


class PivotError(NumericalError):
    """Unpivoted elimination met a (near) vanishing leading minor."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
