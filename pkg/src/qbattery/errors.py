"""Exception hierarchy shared by all modules."""


class QBatteryError(Exception):
    """Base class for every error raised by this package."""


class LayoutError(QBatteryError, ValueError):
    """Operands live on different (or incompatible) Hilbert-space layouts."""


class InvalidSectorError(QBatteryError, ValueError):
    pass


class UnsupportedConfigurationError(QBatteryError, ValueError):
    pass


class AccuracyError(QBatteryError, ArithmeticError):
    """A propagated quantity drifted beyond its tolerance.

    Raised instead of silently renormalising; the usual cure is a smaller
    ``dt_max`` on the time grid.
    """


class TruncationError(AccuracyError):
    """Population reached the top of the truncated Fock space (raise ``n_max``)."""


class ConfigError(QBatteryError, ValueError):
    pass
