"""Exception types shared across the package."""


class RdsLabError(Exception):
    """Base class for failures raised by this package."""


class ValidationError(RdsLabError):
    """Input data violates a structural contract (malformed file, bad sample)."""


class TuningError(RdsLabError):
    """A network tuning target was not reached within the iteration budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CalibrationError(RdsLabError):
    """Triad-closure calibration could not reach the target mean degree."""


class BootstrapError(RdsLabError):
    """Bootstrap resampling kept producing undefined estimates."""
