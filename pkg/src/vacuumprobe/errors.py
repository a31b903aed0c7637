"""Exception and warning types shared across the package."""


class VacuumProbeError(Exception):
    """Base class for all errors raised by vacuumprobe."""


class DomainError(VacuumProbeError, ValueError):
    pass


class PoleError(DomainError):
    pass


class ParameterError(DomainError):
    pass


class ConvergenceError(VacuumProbeError, ArithmeticError):
    pass


class SpecialFunctionDomain(VacuumProbeError, ArithmeticError):
    pass


class InvalidInterval(DomainError):
    pass


class CutoffTooSmall(VacuumProbeError, ValueError):
    pass


class DimensionTooLarge(VacuumProbeError, ValueError):
    pass


class NormDriftExceeded(VacuumProbeError, ArithmeticError):
    pass


class PeakOutsideGrid(VacuumProbeError, ValueError):
    pass


class PerturbativityWarning(UserWarning):
    """4(gt)^2 is no longer small; first-order transition probability is unreliable."""


class ToleranceNotMet(UserWarning):
    """Adaptive quadrature stopped before reaching the requested tolerance."""
