"""Exception hierarchy. Everything raised on purpose derives from DsaError."""


class DsaError(Exception):
    """Base class for all simulator errors."""


class DomainError(DsaError):
    """Input outside the physical or mathematical domain of an operation."""


class DimensionError(DomainError):
    """Array arguments whose shapes or lengths do not line up."""


class ConfigError(DsaError):
    """Invalid experiment configuration; message names the offending key."""


class SingularityError(DsaError):
    """Exact pole of a lossless load network was hit."""


class SolverError(DsaError):
    """Linear system unusable: singular, or condition estimate over the cap."""

    def __init__(self, message: str, condition_estimate: float | None = None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ModelConsistencyError(DsaError):
    """A conservation or passivity invariant failed; indicates a modeling bug."""


class DegenerateChannelError(DsaError):
    """Objective undefined: the channel response is identically zero."""
