"""Exception and warning types shared across the package."""


class QHeatError(Exception):
    """Base class for all errors raised by qheat."""


class DomainError(QHeatError, ValueError):
    """A point or argument lies outside the region where an operation is defined."""


class HypothesisError(QHeatError, ValueError):
    """Problem data violate a solvability hypothesis (e.g. a vanishing source mean)."""


class NumericalError(QHeatError, ArithmeticError):
    """A computation cannot be carried out reliably at the working precision."""


class TruncationWarning(RuntimeWarning):
    """An infinite sum or product hit its hard term cap before converging."""
