"""Exception types shared across the package."""


class AnomalyError(Exception):
    """Base class for all package errors."""


class InvalidDims(AnomalyError, ValueError):
    pass


class NotHermitian(AnomalyError, ValueError):
    pass


class DegenerateState(AnomalyError, ValueError):
    pass


class TooLarge(AnomalyError, ValueError):
    pass


class ScenarioMismatch(AnomalyError, ValueError):
    pass


class Unsupported(AnomalyError, ValueError):
    pass


class Inconclusive(AnomalyError):
    """An iterative routine hit its budget before certifying its answer.

    The best value found and the remaining gap are attached so callers can
    still report them.
    """

    def __init__(self, message, value=None, gap=None, result=None):
        super().__init__(message)
        self.value = value
        self.gap = gap
        self.result = result
