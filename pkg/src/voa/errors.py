"""Exception types shared across the package."""


class VoaError(Exception):
    """Base class for errors raised by this package."""


class WindowExceeded(VoaError):
    """A computation needed data outside the declared truncation window."""


class LatticeMismatch(VoaError):
    """A mode index or exponent does not lie on the required (1/T)Z coset."""


class AmbientMismatch(VoaError, ValueError):
    """Two subspaces live in ambient spaces of different dimension."""
