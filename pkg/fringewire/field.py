"""
Classical interference field of two crossing Gaussian beams.

The field lives on a 1-D transverse axis y (micrometres) normal to the fringes
at the intersection plane:

    E(y) = G(y) · [exp(+i k y α/2) + r · exp(−i k y α/2 + i φ)],
    G(y) = exp(−y² / w²),   k = 2π / λ

so the single-beam peak intensity is 1 and the fringe period is l = λ / α.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from .errors import (
    AliasedGridError,
    FringeDetectionError,
    NoFringeError,
    UndefinedVisibilityError,
)

log = logging.getLogger(__name__)

DEFAULT_WAVELENGTH = 0.633
DEFAULT_CROSSING_ANGLE = 0.01
DEFAULT_WAIST = 500.0

MIN_SAMPLES = 16
MIN_SAMPLES_PER_FRINGE = 8
DARK_THRESHOLD = 1e-3
ENVELOPE_FLOOR = 1e-6
VISIBILITY_CORE = 0.5


# ─────────────────────────────────────────────────────────────────────────────
# Domain types
# ─────────────────────────────────────────────────────────────────────────────

class BeamPair(BaseModel):
    """Physical parameters of the two crossing beams (lengths in micrometres)."""

    model_config = ConfigDict(frozen=True)

    wavelength: float = Field(DEFAULT_WAVELENGTH, gt=0)
    crossing_angle: float = Field(DEFAULT_CROSSING_ANGLE, gt=0, lt=0.2)
    waist: float = Field(DEFAULT_WAIST, gt=0)
    amplitude_ratio: float = Field(1.0, ge=0)
    relative_phase: float = 0.0

    @model_validator(mode="after")
    def _waist_resolves_wavelength(self) -> "BeamPair":
        if self.waist < 10 * self.wavelength:
            raise ValueError(
                f"waist {self.waist} um must be at least 10 wavelengths "
                f"({10 * self.wavelength} um)"
            )
        return self

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength

    def single_beam(self) -> "BeamPair":
        """The same pair with beam 2 blocked."""
        return self.model_copy(update={"amplitude_ratio": 0.0})

    def with_waist(self, waist: float) -> "BeamPair":
        return BeamPair(**{**self.model_dump(), "waist": waist})


class GridSpec(BaseModel):
    """Uniform sampling grid centred on the beam axis."""

    model_config = ConfigDict(frozen=True)

    step: float = Field(0.5, gt=0)
    half_width: float | None = Field(None, gt=0)

    def window(self, beams: BeamPair) -> tuple[float, float]:
        half = self.half_width if self.half_width is not None else 4 * beams.waist
        return -half, half

    def sample_count(self, beams: BeamPair) -> int:
        start, stop = self.window(beams)
        return int(np.ceil((stop - start) / self.step)) + 1


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex scalar amplitude sampled on a uniform transverse grid."""

    samples: np.ndarray
    origin: float
    spacing: float
    wavelength: float
    envelope: np.ndarray | None = dataclass_field(default=None)

    def __post_init__(self) -> None:
        if self.spacing <= 0:
            raise AliasedGridError(f"grid spacing must be positive, got {self.spacing}")
        if len(self.samples) < MIN_SAMPLES:
            raise AliasedGridError(
                f"need at least {MIN_SAMPLES} samples, got {len(self.samples)}"
            )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def stop(self) -> float:
        return self.origin + self.spacing * (len(self.samples) - 1)

    @property
    def positions(self) -> np.ndarray:
        return np.linspace(self.origin, self.stop, len(self.samples))

    @property
    def power(self) -> float:
        """Total power Σ|E|²·dy in units of single-beam peak intensity × μm."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.spacing)

    def with_samples(self, samples: np.ndarray) -> "ComplexField":
        return replace(self, samples=np.asarray(samples, dtype=complex))


@dataclass(frozen=True)
class FringeGeometry:
    spacing_l: float
    dark_positions: list[float]
    bright_positions: list[float]
    minima_positions: list[float]


# ─────────────────────────────────────────────────────────────────────────────
# Operations
# ─────────────────────────────────────────────────────────────────────────────

def fringe_spacing(beams: BeamPair) -> float:
    """Fringe period l = λ/α."""
    if beams.crossing_angle <= 0:
        raise NoFringeError("beams do not cross: no fringes at the intersection")
    return beams.wavelength / beams.crossing_angle


def superpose(
    beams: BeamPair,
    window: tuple[float, float],
    sample_count: int,
    include: Iterable[int] = (1, 2),
) -> ComplexField:
    """
    Sample the two-beam superposition on `sample_count` points spanning
    `window` (both ends included). `include` selects which beams contribute.
    """
    start, stop = window
    if sample_count < MIN_SAMPLES:
        raise AliasedGridError(f"need at least {MIN_SAMPLES} samples, got {sample_count}")
    if stop <= start:
        raise AliasedGridError(f"empty window ({start}, {stop})")

    spacing = (stop - start) / (sample_count - 1)
    limit = fringe_spacing(beams) / MIN_SAMPLES_PER_FRINGE
    if spacing > limit * (1 + 1e-12):
        raise AliasedGridError(
            f"grid spacing {spacing:.4g} um exceeds l/{MIN_SAMPLES_PER_FRINGE} = "
            f"{limit:.4g} um; fringes would alias"
        )

    include = set(include)
    y = np.linspace(start, stop, sample_count)
    half_k = 0.5 * beams.wavenumber * beams.crossing_angle
    gauss = np.exp(-((y / beams.waist) ** 2))

    samples = np.zeros(sample_count, dtype=complex)
    if 1 in include:
        samples = samples + gauss * np.exp(1j * half_k * y)
    if 2 in include:
        samples = samples + beams.amplitude_ratio * gauss * np.exp(
            1j * (beams.relative_phase - half_k * y)
        )

    return ComplexField(
        samples=samples,
        origin=start,
        spacing=spacing,
        wavelength=beams.wavelength,
        envelope=gauss**2,
    )


def build_field(beams: BeamPair, grid: GridSpec | None = None) -> ComplexField:
    grid = grid or GridSpec()
    return superpose(beams, grid.window(beams), grid.sample_count(beams))


def intensity(field: ComplexField) -> np.ndarray:
    return np.abs(field.samples) ** 2


def compensated_intensity(field: ComplexField) -> np.ndarray:
    """
    Intensity divided by the Gaussian envelope, i.e. the bare fringe term.
    Samples where the envelope is below ENVELOPE_FLOOR of its peak are 0.
    """
    if field.envelope is None:
        raise FringeDetectionError("field carries no envelope to compensate")
    env = field.envelope
    significant = env >= ENVELOPE_FLOOR * env.max()
    out = np.zeros_like(env, dtype=float)
    out[significant] = intensity(field)[significant] / env[significant]
    return out


def _refined_extremum(values: np.ndarray, index: int, maximum: bool) -> float:
    """Extremum value near `index` from a local cubic spline of the samples."""
    lo = max(index - 3, 0)
    hi = min(index + 4, len(values))
    if hi - lo < 4:
        return float(values[index])

    x = np.arange(lo, hi, dtype=float)
    spline = CubicSpline(x, values[lo:hi])
    sign = -1.0 if maximum else 1.0
    a = max(index - 1, lo)
    b = min(index + 1, hi - 1)
    best = minimize_scalar(
        lambda t: sign * float(spline(t)),
        bounds=(a, b),
        method="bounded",
        options={"xatol": 1e-9},
    )
    refined = sign * float(best.fun)
    # the spline may only improve on the sample itself
    return max(refined, float(values[index])) if maximum else min(refined, float(values[index]))


def visibility(
    intensity_profile: Sequence[float],
    envelope: Sequence[float] | None = None,
) -> float:
    """
    Fringe contrast V = (I_max − I_min) / (I_max + I_min).

    With an `envelope`, the profile is divided by it and only the central
    region (envelope ≥ half its peak) is used, so V measures the interference
    contrast rather than the Gaussian roll-off.
    """
    profile = np.asarray(intensity_profile, dtype=float)
    if profile.size == 0 or not np.any(profile > 0):
        raise UndefinedVisibilityError("visibility of an all-zero profile is undefined")

    if envelope is not None:
        env = np.asarray(envelope, dtype=float)
        core = env >= VISIBILITY_CORE * env.max()
        profile = profile[core] / env[core]

    i_max = _refined_extremum(profile, int(np.argmax(profile)), maximum=True)
    i_min = max(_refined_extremum(profile, int(np.argmin(profile)), maximum=False), 0.0)
    if i_max + i_min <= 0:
        raise UndefinedVisibilityError("visibility of an all-zero profile is undefined")
    return float(np.clip((i_max - i_min) / (i_max + i_min), 0.0, 1.0))


def field_visibility(field: ComplexField) -> float:
    return visibility(intensity(field), field.envelope)


def _parabolic(y: np.ndarray, c: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    left, mid, right = c[idx - 1], c[idx], c[idx + 1]
    curvature = left - 2 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(curvature != 0, 0.5 * (left - right) / curvature, 0.0)
    dy = y[1] - y[0]
    positions = y[idx] + offset * dy
    values = mid - 0.25 * (left - right) * offset
    return positions, values


def locate_fringes(field: ComplexField) -> FringeGeometry:
    """Find dark and bright fringes of the envelope-compensated profile."""
    if field.envelope is None:
        raise FringeDetectionError("field carries no envelope to compensate")

    env = field.envelope
    significant = np.flatnonzero(env >= ENVELOPE_FLOOR * env.max())
    y = field.positions[significant]
    c = intensity(field)[significant] / env[significant]

    prominence = 1e-6 * float(c.max()) if c.size else 0.0
    minima, _ = find_peaks(-c, prominence=prominence)
    maxima, _ = find_peaks(c, prominence=prominence)
    if len(minima) < 2 or len(maxima) < 1:
        raise FringeDetectionError(
            f"no fringes detected ({len(minima)} minima, {len(maxima)} maxima)"
        )

    min_pos, min_val = _parabolic(y, c, minima)
    max_pos, max_val = _parabolic(y, c, maxima)

    dark = []
    for pos, val, idx in zip(min_pos, min_val, minima):
        k = int(np.searchsorted(maxima, idx))
        neighbours = [max_val[j] for j in (k - 1, k) if 0 <= j < len(maxima)]
        if val <= DARK_THRESHOLD * max(neighbours):
            dark.append(float(pos))

    slope = np.polyfit(np.arange(len(min_pos)), min_pos, 1)[0]
    log.debug("Located %d minima, %d dark, period %.6g um", len(min_pos), len(dark), slope)
    return FringeGeometry(
        spacing_l=float(slope),
        dark_positions=dark,
        bright_positions=[float(p) for p in max_pos],
        minima_positions=[float(p) for p in min_pos],
    )


def dark_fringe_near(beams: BeamPair, y: float = 0.0) -> float:
    """Centre of the dark fringe closest to `y`."""
    l = fringe_spacing(beams)
    offset = beams.relative_phase / (2 * np.pi) + 0.5
    m = np.round(y / l - offset)
    return float(l * (offset + m))


def bright_fringe_near(beams: BeamPair, y: float = 0.0) -> float:
    l = fringe_spacing(beams)
    offset = beams.relative_phase / (2 * np.pi)
    m = np.round(y / l - offset)
    return float(l * (offset + m))
