"""Exception types shared across the package."""


class GocdrError(Exception):
    """Base class for workbench errors."""


class ParameterError(GocdrError, ValueError):
    """An argument is out of range, non-finite, or otherwise invalid."""


class SupportExceededError(GocdrError):
    """A PDF grid would exceed the configured maximum support."""


class InvalidStateError(GocdrError, ValueError):
    """A state machine was constructed in a forbidden state."""


class BracketError(GocdrError):
    """A root/threshold search bracket does not straddle the target."""


class TargetUnreachableError(GocdrError):
    """An inverse-design target is outside the achievable range."""


class ConfigError(GocdrError):
    """A run configuration file is missing, unreadable, or schema-invalid."""


class SimulationOverflowError(GocdrError):
    """A simulation request exceeds the supported length for its engine."""
