"""Exception types raised by dotweb."""


class DotwebError(Exception):
    """Base class for all dotweb errors."""


class DegenerateDivision(DotwebError, ZeroDivisionError):
    """A binomial denominator in the sector coefficients vanished."""


class InvalidPair(DotwebError, ValueError):
    """The requested pair of dots does not exist for this configuration."""


class InvalidSpin(DotwebError, ValueError):
    """No dot with the requested initial spin exists for this configuration."""


class SizeLimit(DotwebError, MemoryError):
    """The brute-force oracle refuses systems this large."""


class ShapeError(DotwebError, ValueError):
    """An operator has the wrong shape for the requested operation."""
