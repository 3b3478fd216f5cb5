"""Exception types shared across the package."""


class RelaxometerError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(RelaxometerError, ValueError):
    """Operands live on Hilbert spaces of different dimensions."""


class DomainError(RelaxometerError, ValueError):
    """An argument is outside the allowed domain (bad block, bad dt, ...)."""


class StateValidityError(RelaxometerError, ValueError):
    """A matrix fails the density-matrix requirements beyond tolerance."""


class ResourceGuardError(RelaxometerError, RuntimeError):
    """Requested system size exceeds the dense-storage guard."""


class UnsupportedMetricError(RelaxometerError, ValueError):
    """The requested metric is not available on this computational path."""


class NoSolutionError(RelaxometerError, ValueError):
    """A solver target is outside the attainable range (e.g. energy matching)."""


class ConfigError(RelaxometerError, ValueError):
    """An experiment configuration is incomplete or inconsistent."""
