"""Exception types raised across the package."""


class CaliboError(Exception):
    """Base class for all package errors."""


class InvalidDatasetError(CaliboError, ValueError):
    """Observations with inconsistent shapes or non-finite values."""


class InvalidInputError(CaliboError, ValueError):
    """A query point that cannot be evaluated (wrong size, NaN, inf)."""


class DomainError(CaliboError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class TooFewObservationsError(CaliboError, ValueError):
    """Not enough data for the requested split or fit."""


class ObjectiveError(CaliboError, RuntimeError):
    """An objective evaluation failed (crash, timeout, unparseable output)."""
