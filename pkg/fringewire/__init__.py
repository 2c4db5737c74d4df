"""Crossed Gaussian beams, a thin wire in the fringes, and the photons that cross them."""

from .errors import FringewireError
from .field import BeamPair, ComplexField, GridSpec, build_field, fringe_spacing, locate_fringes, visibility
from .obstruction import DetectorPlane, WireComb, WireSpec, blocked_beam_loss, scan_wire
from .quantum import TwoModeState, duality_check, free_propagate, wire_interact
from .transport import EnsembleConfig, run_ensemble

__all__ = [
    "BeamPair",
    "ComplexField",
    "DetectorPlane",
    "EnsembleConfig",
    "FringewireError",
    "GridSpec",
    "TwoModeState",
    "WireComb",
    "WireSpec",
    "blocked_beam_loss",
    "build_field",
    "duality_check",
    "free_propagate",
    "fringe_spacing",
    "locate_fringes",
    "run_ensemble",
    "scan_wire",
    "visibility",
    "wire_interact",
]
