"""Exception hierarchy shared by all dnlsvortex modules."""


class VortexError(Exception):
    """Base class for every error raised by this package."""


class SizingError(VortexError, ValueError):
    """Lattice too small to hold the contour shells."""


class ShapeMismatchError(VortexError, ValueError):
    pass


class ExistenceDomainError(VortexError, ValueError):
    """(beta, omega) outside the region where both amplitudes are real."""


class DegenerateLineError(VortexError, ValueError):
    """beta == 1 requires omega == 1 and an explicit polarization angle."""


class SingularSystemError(VortexError, ArithmeticError):
    pass


class ContinuationError(VortexError, RuntimeError):
    """Newton failed to converge; ``last_good_eps`` records how far we got."""

    def __init__(self, message, last_good_eps, states=None):
        super().__init__(message)
        self.last_good_eps = last_good_eps
        self.states = list(states or [])


class SingularJacobianError(VortexError, ArithmeticError):
    pass


class StaleStateError(VortexError, ValueError):
    pass


class NumericalError(VortexError, ArithmeticError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ManakovError(VortexError, ValueError):
    """beta == 1 handed to a routine that only covers beta != 1."""


class PreconditionError(VortexError, ValueError):
    pass


class StepSizeError(VortexError, RuntimeError):
    """Conserved quantities drifted beyond tolerance during time stepping."""

    def __init__(self, message, power_drift, energy_drift):
        super().__init__(message)
        self.power_drift = power_drift
        self.energy_drift = energy_drift


class ConfigError(VortexError, ValueError):
    pass
