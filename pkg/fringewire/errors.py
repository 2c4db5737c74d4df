class FringewireError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(FringewireError):
    """A run configuration could not be parsed or validated."""


# ─────────────────────────────────────────────────────────────────────────────
# Classical field
# ─────────────────────────────────────────────────────────────────────────────

class AliasedGridError(FringewireError):
    """The sampling grid is too coarse to resolve the fringes."""


class NoFringeError(FringewireError):
    """The beam configuration produces no fringes (zero crossing angle)."""


class FringeDetectionError(FringewireError):
    pass


class UndefinedVisibilityError(FringewireError):
    pass


# ─────────────────────────────────────────────────────────────────────────────
# Wires and detectors
# ─────────────────────────────────────────────────────────────────────────────

class WireOutsideWindowError(FringewireError):
    pass


class WireTooThickError(FringewireError):
    """Wire diameter is not below the fringe spacing."""


class UnresolvedAcceptanceError(FringewireError):
    """The far-field angle grid samples a detector acceptance too sparsely."""


class CalibrationError(FringewireError):
    pass


# ─────────────────────────────────────────────────────────────────────────────
# Quantum bookkeeping
# ─────────────────────────────────────────────────────────────────────────────

class NormalizationError(FringewireError):
    pass


class DualityRangeError(FringewireError):
    pass


class ReportMismatchError(FringewireError):
    """A run report does not belong to the configuration it is checked against."""
