"""Exception hierarchy shared across the package."""


class TailStatError(Exception):
    """Base class for all errors raised by tailstat."""


class DomainError(TailStatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(TailStatError, OverflowError):
    """A request exceeds the range in which a result is exact."""


class DivergentStatisticError(TailStatError, ArithmeticError):
    """The requested statistic has no finite computing formula (stress 3)."""


class InsufficientDataError(TailStatError, ValueError):
    """Too few (or degenerate) observations for a fit."""
