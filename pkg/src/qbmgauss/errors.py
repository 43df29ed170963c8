"""Exception hierarchy shared by all modules."""


class QBMError(Exception):
    """Base class for errors raised by qbmgauss."""


class InvalidArgumentError(QBMError, ValueError):
    pass


class NumericalError(QBMError, ArithmeticError):
    """A numerical routine failed; ``estimate`` carries the best value if any."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DomainError(NumericalError):
    """Input lies outside the region where a formula is evaluated."""


class TruncationError(NumericalError):
    """Fock-space truncation leaks more probability than allowed."""


class NotFoundError(QBMError, LookupError):
    pass
