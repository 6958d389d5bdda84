"""Exception types shared across the package."""


class KerrpairError(Exception):
    """Base class for all library errors."""


class DegenerateNonlinearityError(KerrpairError):
    """alpha1 + alpha2 == 0: the resonance parameter is undefined."""


class PoleError(KerrpairError):
    """A closed-form expression was evaluated at one of its poles."""


class ConvergenceError(KerrpairError):
    """An iterative solver exhausted its budget without converging."""


class IdentificationError(KerrpairError):
    """Eigenstate identification by overlap was ambiguous."""


class BranchTrackingError(KerrpairError):
    """A spectral branch could not be followed across a parameter grid."""


class RootCountError(KerrpairError):
    """Equilibrium search found an unexpected number of roots."""


class PeriodDetectionError(KerrpairError):
    """No closed period could be detected for a trajectory."""


class StepSizeUnderflowError(KerrpairError):
    """Adaptive integration stalled (step size below the resolvable scale)."""


class DomainError(KerrpairError):
    """Argument outside the supported parameter domain."""


class ConfigError(KerrpairError):
    """Invalid run configuration."""
