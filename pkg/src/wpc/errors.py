"""Exception hierarchy shared by all wpc modules."""


class WpcError(Exception):
    """Base class for every error raised by wpc."""


class InvalidPointError(WpcError, ValueError):
    """A point is not strictly inside the unit disk (or is NaN)."""


class ConstructionError(WpcError, ValueError):
    """A group presentation failed validation (relator, hyperbolicity, shape)."""


class ResourceError(WpcError, RuntimeError):
    """A configured cap (element count, rejection efficiency) was exceeded."""


class TruncationError(WpcError, RuntimeError):
    """The truncated enumeration is too shallow for the requested operation."""


class HypothesisError(WpcError, ValueError):
    """A numeric hypothesis (epsilon0 threshold, radius vs injectivity) fails."""


class NumericError(WpcError, ArithmeticError):
    """Non-finite or otherwise unusable numeric values were produced."""
