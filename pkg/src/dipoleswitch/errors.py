"""Exception hierarchy shared across the package."""


class DipoleSwitchError(Exception):
    """Base class for all errors raised by dipoleswitch."""


class InvalidInputError(DipoleSwitchError, ValueError):
    """Malformed or out-of-contract argument."""


class SizeLimitError(DipoleSwitchError, ValueError):
    """Requested system exceeds the configured dipole-count limit."""


class InvalidGeometryError(DipoleSwitchError, ValueError):
    """Geometry violates its invariants (e.g. coincident positions)."""


class DegenerateReferenceError(DipoleSwitchError, ValueError):
    """Reference coupling vanishes (magic-angle pair), so no energy unit exists."""


class InvalidPairError(DipoleSwitchError, ValueError):
    """Dipole pair indices are invalid (equal or out of range)."""


class InvalidDensityError(DipoleSwitchError, ValueError):
    """Matrix is not a valid density matrix beyond the clamping tolerance."""


class InvalidConfigError(DipoleSwitchError, ValueError):
    """Sweep configuration violates its invariants."""


class OutputError(DipoleSwitchError, OSError):
    """Result serialization failed; the message carries the path context."""
