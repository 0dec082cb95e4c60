"""Exception hierarchy shared by all modules."""


class MbscError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MbscError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigurationError(MbscError, ValueError):
    """Invalid grid or parameter configuration."""


class ResolutionError(ConfigurationError):
    """Grid too coarse or too small to represent the requested state."""


class EdgeSpillError(MbscError):
    """A shift would push non-negligible amplitude past the grid edge."""


class GridMismatchError(MbscError, ValueError):
    """Two states live on different grids."""


class NotNormalizedError(MbscError, ValueError):
    """An operation requiring a normalized state received one that is not."""


class ResourceGuardError(MbscError):
    """A requested computation exceeds the configured memory guard."""
