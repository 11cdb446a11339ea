"""Exception hierarchy.

Each concrete class name doubles as the diagnostic code printed by the CLI,
so ``str(exc)`` always starts with the class name.
"""


class DtspError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1

    def __init__(self, message=""):
        self.detail = message
        text = type(self).__name__
        if message:
            text = f"{text}: {message}"
        super().__init__(text)


class ParameterError(DtspError, ValueError):
    """Invalid distribution parameters."""


class NonIntegerEndpoint(ParameterError):
    pass


class EmptySupport(ParameterError):
    pass


class ThresholdOutOfRange(ParameterError):
    pass


class NonPositiveShape(ParameterError):
    pass


class DomainError(DtspError, ValueError):
    """Argument outside the domain of a function (x, u or q)."""


class OutOfSupport(DtspError, ValueError):
    pass


class BranchCrossing(DtspError, ValueError):
    pass


class DataError(DtspError, ValueError):
    exit_code = 2


class EmptyData(DataError):
    pass


class DataOutOfSupport(DataError):
    pass


class DataParseError(DataError):
    pass


class InvalidInterval(DtspError, ValueError):
    pass


class NumericalFailure(DtspError, RuntimeError):
    exit_code = 3


class ConfigError(DtspError, ValueError):
    pass
