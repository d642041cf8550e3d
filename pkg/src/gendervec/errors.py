"""Exception hierarchy shared by every pipeline stage.

The command line maps these onto exit codes: configuration errors exit
with 2, data errors with 3, numerical failures with 4.
"""


class GendervecError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(GendervecError, ValueError):
    """A parameter, config field or flag value is out of range or inconsistent."""

    exit_code = 2


class DataError(GendervecError, ValueError):
    """Input data is malformed, inconsistent or unusable."""

    exit_code = 3


class NumericalError(GendervecError, ArithmeticError):
    """A numerical routine diverged, failed to converge or produced non-finite values."""

    exit_code = 4
