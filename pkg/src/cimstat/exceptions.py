"""Exception types raised by cimstat."""


class InvalidInputError(ValueError):
    """Data violates an operation's preconditions (length, finiteness, range)."""


class InvalidConfigError(ValueError):
    """A configuration parameter is outside its admissible set."""


class CalibrationError(RuntimeError):
    """A null distribution could not be fitted."""


class TieWarning(UserWarning):
    """Ties found where an estimator assumes continuous data."""
