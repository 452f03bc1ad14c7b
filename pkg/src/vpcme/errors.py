"""Exception types shared across the package."""


class VpcmeError(Exception):
    """Base class for all errors raised by this package."""


class CsvFormatError(VpcmeError):
    """A data file could not be parsed; the message names the offending line."""


class ConfigError(VpcmeError):
    """A configuration value is out of range or inconsistent."""


class ValidationError(VpcmeError):
    """An input violates a documented precondition (shape, symmetry, ...)."""


class UndefinedMetricError(VpcmeError):
    """A metric has no defined value for the given inputs (e.g. zero instances)."""
