"""Exception and warning types shared across the package."""


class WamalgamError(Exception):
    """Base class for structured errors raised by this package."""


class DimensionMismatchError(WamalgamError):
    """Operands live on groups or grids of different dimensions."""


class GroupMismatchError(WamalgamError):
    """Operands belong to different group specifications."""


class InvalidElementError(WamalgamError):
    """A coordinate vector violates the group's element invariants."""


class EmptyGridError(WamalgamError):
    """An operation received a grid or point set with no points."""


class NonFiniteSampleError(WamalgamError):
    """Sampled values contain NaN or infinities where finite data is required."""


class InvalidExponentError(WamalgamError):
    """An integrability exponent or quasi-norm constant is out of range."""


class DensityError(WamalgamError):
    """A point set fails the requested covering-density check.

    Carries the first uncovered probe point in ``args[1]`` when available.
    """


class IndexMismatchError(WamalgamError):
    """Coefficients, weights and point families are indexed inconsistently."""


class WeightDomainError(WamalgamError):
    """A weight is evaluated or integrated outside its valid domain."""


class ConfigError(WamalgamError):
    """A run configuration failed validation; message is key-path anchored."""


class TruncationWarning(UserWarning):
    """Computed support exceeds the configured window; result is truncated."""


class CoverageWarning(UserWarning):
    """A translation or resampling pushed most of the mass off the window."""
