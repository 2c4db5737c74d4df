"""
Thin opaque wires in the intersection plane and Fraunhofer propagation of the
masked field to two angular detectors.

Far-field amplitude (small-angle, direct sum):

    A(θ) = Σ_j E(y_j) · exp(−i k θ y_j) · dy

Detected power is (1/λ)∫|A(θ)|² dθ over each acceptance, which equals Σ|E|²dy
when the acceptances hold the whole spectrum.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid
from scipy.optimize import bisect
from scipy.signal import find_peaks

from .errors import (
    CalibrationError,
    UnresolvedAcceptanceError,
    WireOutsideWindowError,
    WireTooThickError,
)
from .field import (
    BeamPair,
    ComplexField,
    GridSpec,
    bright_fringe_near,
    build_field,
    fringe_spacing,
    locate_fringes,
)

log = logging.getLogger(__name__)

DEFAULT_WIRE_DIAMETER = 17.0
DEFAULT_ANGLE_SAMPLES = 257
MIN_ACCEPTANCE_SAMPLES = 32
ANGLE_BLOCK = 64


# ─────────────────────────────────────────────────────────────────────────────
# Domain types
# ─────────────────────────────────────────────────────────────────────────────

class WireSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    center: float = 0.0
    diameter: float = Field(DEFAULT_WIRE_DIAMETER, gt=0)
    clamped: bool = True

    @property
    def interval(self) -> tuple[float, float]:
        half = 0.5 * self.diameter
        return self.center - half, self.center + half

    def moved_to(self, center: float) -> "WireSpec":
        return self.model_copy(update={"center": float(center)})

    def check_thin(self, beams: BeamPair) -> None:
        l = fringe_spacing(beams)
        if self.diameter >= l:
            raise WireTooThickError(
                f"wire diameter {self.diameter} um is not below the fringe spacing {l:.6g} um"
            )


class WireComb(BaseModel):
    """A set of wires sharing a common misalignment offset."""

    model_config = ConfigDict(frozen=True)

    wires: list[WireSpec] = Field(default_factory=list)
    misalignment: float = 0.0

    @model_validator(mode="after")
    def _disjoint(self) -> "WireComb":
        spans = sorted(w.interval for w in self.wires)
        for (_, hi), (lo, _) in zip(spans, spans[1:]):
            if lo < hi:
                raise ValueError("wire intervals overlap")
        return self

    def intervals(self) -> list[tuple[float, float]]:
        return [(lo + self.misalignment, hi + self.misalignment) for lo, hi in
                (w.interval for w in self.wires)]


class DetectorPlane(BaseModel):
    """
    Angular acceptances of the two end detectors. Beam 1 (phase +kyα/2)
    leaves along +α/2 under the transform sign used here, beam 2 along −α/2.
    """

    model_config = ConfigDict(frozen=True)

    acceptance_1: tuple[float, float]
    acceptance_2: tuple[float, float]

    @model_validator(mode="after")
    def _ordered_and_disjoint(self) -> "DetectorPlane":
        for lo, hi in (self.acceptance_1, self.acceptance_2):
            if not lo < hi:
                raise ValueError(f"empty acceptance interval ({lo}, {hi})")
        (a_lo, a_hi), (b_lo, b_hi) = self.acceptance_1, self.acceptance_2
        if a_lo < b_hi and b_lo < a_hi:
            raise ValueError("detector acceptances overlap")
        return self

    @classmethod
    def for_beams(cls, beams: BeamPair, half_width: float | None = None) -> "DetectorPlane":
        half = half_width if half_width is not None else beams.crossing_angle / 4
        centre = beams.crossing_angle / 2
        plane = cls(
            acceptance_1=(centre - half, centre + half),
            acceptance_2=(-centre - half, -centre + half),
        )
        if not (plane.acceptance_1[0] < centre < plane.acceptance_1[1]):
            raise ValueError("acceptance 1 does not contain the beam-1 direction")
        return plane

    def angle_grid(self, samples: int = DEFAULT_ANGLE_SAMPLES) -> np.ndarray:
        return np.concatenate([
            np.linspace(*self.acceptance_2, samples),
            np.linspace(*self.acceptance_1, samples),
        ])


@dataclass(frozen=True, eq=False)
class FarField:
    angles: np.ndarray
    amplitudes: np.ndarray
    wavelength: float

    def __sub__(self, other: "FarField") -> "FarField":
        return FarField(self.angles, self.amplitudes - other.amplitudes, self.wavelength)


@dataclass(frozen=True)
class ScanRow:
    wire_center: float
    count_1: float
    count_2: float
    loss_fraction: float
    absorbed_fraction: float

    @property
    def diffracted_fraction(self) -> float:
        return self.loss_fraction - self.absorbed_fraction

    @property
    def reported_loss(self) -> float:
        """Loss with small negative discretization residue clamped to zero."""
        return max(self.loss_fraction, 0.0)


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    reference_counts: tuple[float, float]
    wire_count: int = 1

    @property
    def positions(self) -> np.ndarray:
        return np.array([r.wire_center for r in self.rows])

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss_fraction for r in self.rows])


@dataclass(frozen=True)
class Calibration:
    waist: float
    blocked_loss: float
    bright_loss: float


# ─────────────────────────────────────────────────────────────────────────────
# Masks and transforms
# ─────────────────────────────────────────────────────────────────────────────

def wire_coverage(field: ComplexField, comb: WireComb) -> np.ndarray:
    """Covered fraction of each sample cell [y − dy/2, y + dy/2]."""
    y = field.positions
    half = 0.5 * field.spacing
    cell_lo, cell_hi = y - half, y + half
    cover = np.zeros(len(y))
    for lo, hi in comb.intervals():
        if lo < field.origin - half or hi > field.stop + half:
            raise WireOutsideWindowError(
                f"wire ({lo:.6g}, {hi:.6g}) um lies outside the window "
                f"({field.origin:.6g}, {field.stop:.6g}) um"
            )
        overlap = np.minimum(cell_hi, hi) - np.maximum(cell_lo, lo)
        cover += np.clip(overlap, 0.0, None) / field.spacing
    return np.clip(cover, 0.0, 1.0)


def apply_mask(field: ComplexField, comb: WireComb) -> ComplexField:
    return field.with_samples(field.samples * (1.0 - wire_coverage(field, comb)))


def wire_field(field: ComplexField, comb: WireComb) -> ComplexField:
    """The complementary aperture: the part of the field the wires remove."""
    return field.with_samples(field.samples * wire_coverage(field, comb))


def _fraunhofer_sum(
    samples: np.ndarray,
    positions: np.ndarray,
    spacing: float,
    angles: np.ndarray,
    wavenumber: float,
) -> np.ndarray:
    out = np.empty(len(angles), dtype=complex)
    for start in range(0, len(angles), ANGLE_BLOCK):
        block = angles[start:start + ANGLE_BLOCK]
        kernel = np.exp(-1j * wavenumber * np.outer(block, positions))
        out[start:start + ANGLE_BLOCK] = kernel @ samples
    return out * spacing


def farfield(field: ComplexField, angles: Sequence[float]) -> FarField:
    angles = np.asarray(angles, dtype=float)
    k = 2 * np.pi / field.wavelength
    amplitudes = _fraunhofer_sum(field.samples, field.positions, field.spacing, angles, k)
    return FarField(angles=angles, amplitudes=amplitudes, wavelength=field.wavelength)


def _acceptance_power(far: FarField, interval: tuple[float, float]) -> float:
    lo, hi = interval
    tol = 1e-12 * max(abs(lo), abs(hi), 1e-12)
    inside = (far.angles >= lo - tol) & (far.angles <= hi + tol)
    if np.count_nonzero(inside) < MIN_ACCEPTANCE_SAMPLES:
        raise UnresolvedAcceptanceError(
            f"acceptance ({lo:.6g}, {hi:.6g}) rad holds {np.count_nonzero(inside)} angle "
            f"samples, need {MIN_ACCEPTANCE_SAMPLES}"
        )
    theta = far.angles[inside]
    order = np.argsort(theta)
    power = np.abs(far.amplitudes[inside][order]) ** 2
    return float(trapezoid(power, theta[order]) / far.wavelength)


def detector_counts(far: FarField, plane: DetectorPlane) -> tuple[float, float]:
    """Optical power entering each detector, in units of field power."""
    return _acceptance_power(far, plane.acceptance_1), _acceptance_power(far, plane.acceptance_2)


# ─────────────────────────────────────────────────────────────────────────────
# Scans
# ─────────────────────────────────────────────────────────────────────────────

class _Propagator:
    """Unmasked far field of one field, reused for every mask via Babinet."""

    def __init__(self, field: ComplexField, plane: DetectorPlane, angle_samples: int):
        self.field = field
        self.plane = plane
        self.angles = plane.angle_grid(angle_samples)
        self.unmasked = farfield(field, self.angles)
        self.reference = detector_counts(self.unmasked, plane)
        self.k = 2 * np.pi / field.wavelength
        self.power = field.power

    def row(self, comb: WireComb, label: float) -> ScanRow:
        cover = wire_coverage(self.field, comb)
        idx = np.flatnonzero(cover)
        removed = self.field.samples[idx] * cover[idx]
        blocked = _fraunhofer_sum(
            removed, self.field.positions[idx], self.field.spacing, self.angles, self.k
        )
        masked = FarField(self.angles, self.unmasked.amplitudes - blocked, self.field.wavelength)
        c1, c2 = detector_counts(masked, self.plane)
        reference = sum(self.reference)
        loss = 1.0 - (c1 + c2) / reference if reference > 0 else 0.0
        # power landing on the wires: intensity times covered cell fraction
        absorbed = (
            float(np.sum(np.abs(self.field.samples[idx]) ** 2 * cover[idx]) * self.field.spacing)
            / self.power
            if self.power > 0 else 0.0
        )
        return ScanRow(
            wire_center=float(label),
            count_1=c1,
            count_2=c2,
            loss_fraction=loss,
            absorbed_fraction=absorbed,
        )


def scan_wire(
    beams: BeamPair,
    wire: WireSpec,
    plane: DetectorPlane,
    positions: Sequence[float],
    grid: GridSpec | None = None,
    angle_samples: int = DEFAULT_ANGLE_SAMPLES,
    workers: int = 1,
) -> ScanResult:
    """Move one wire across the intersection and record the detector counts."""
    positions = [float(p) for p in positions]
    if not positions:
        raise ValueError("scan needs at least one wire position")
    wire.check_thin(beams)

    prop = _Propagator(build_field(beams, grid), plane, angle_samples)
    log.info("Scanning %d wire positions (d=%.4g um)", len(positions), wire.diameter)

    def one(y: float) -> ScanRow:
        return prop.row(WireComb(wires=[wire.moved_to(y)]), y)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, positions))
    else:
        rows = [one(y) for y in positions]

    log.info("Scan complete: max loss %.4g", max(r.loss_fraction for r in rows))
    return ScanResult(rows=rows, reference_counts=prop.reference)


def default_scan_positions(beams: BeamPair, periods: float = 2.0, steps_per_period: int = 40) -> np.ndarray:
    l = fringe_spacing(beams)
    n = int(round(periods * steps_per_period))
    return np.arange(-n, n + 1) * (l / steps_per_period)


def scan_period(result: ScanResult) -> float:
    """Period of the loss curve from its unbiased autocorrelation."""
    positions = result.positions
    step = positions[1] - positions[0]
    signal = result.losses - result.losses.mean()
    n = len(signal)
    full = np.correlate(signal, signal, mode="full")[n - 1:]
    acf = full / (n - np.arange(n))
    peaks, _ = find_peaks(acf[: n // 2 + 1])
    if len(peaks) == 0:
        raise ValueError("scan too short to show a period")
    heights = acf[peaks]
    first = peaks[np.argmax(heights >= 0.5 * heights.max())]
    return float(first * step)


def blocked_beam_loss(
    beams: BeamPair,
    wire: WireSpec,
    plane: DetectorPlane,
    grid: GridSpec | None = None,
    angle_samples: int = DEFAULT_ANGLE_SAMPLES,
) -> ScanRow:
    """Loss with beam 2 blocked: no fringes, only wire absorption and diffraction."""
    single = beams.single_beam()
    prop = _Propagator(build_field(single, grid), plane, angle_samples)
    return prop.row(WireComb(wires=[wire]), wire.center)


def comb_at_dark_fringes(
    beams: BeamPair,
    plane: DetectorPlane,
    misalignment: float = 0.0,
    diameter: float = DEFAULT_WIRE_DIAMETER,
    grid: GridSpec | None = None,
    angle_samples: int = DEFAULT_ANGLE_SAMPLES,
) -> ScanResult:
    """One wire on every dark fringe, all shifted by `misalignment`."""
    return comb_sweep(beams, plane, [misalignment], diameter, grid, angle_samples)


def comb_sweep(
    beams: BeamPair,
    plane: DetectorPlane,
    misalignments: Sequence[float],
    diameter: float = DEFAULT_WIRE_DIAMETER,
    grid: GridSpec | None = None,
    angle_samples: int = DEFAULT_ANGLE_SAMPLES,
) -> ScanResult:
    field = build_field(beams, grid)
    geometry = locate_fringes(field)
    prop = _Propagator(field, plane, angle_samples)
    template = WireSpec(diameter=diameter)
    template.check_thin(beams)

    # keep only wires that stay inside the window for every shift in the sweep
    reach = max((abs(m) for m in misalignments), default=0.0) + 0.5 * diameter + field.spacing
    centres = [p for p in geometry.dark_positions
               if field.origin + reach <= p <= field.stop - reach]
    wires = [template.moved_to(p) for p in centres]
    log.info("Dark-fringe comb: %d wires, %d misalignments", len(wires), len(misalignments))

    rows = [prop.row(WireComb(wires=wires, misalignment=m), m) for m in misalignments]
    return ScanResult(rows=rows, reference_counts=prop.reference, wire_count=len(wires))


def calibrate_waist(
    target: float,
    beams: BeamPair,
    wire: WireSpec,
    plane: DetectorPlane,
    bounds: tuple[float, float] = (100.0, 1000.0),
    grid: GridSpec | None = None,
    angle_samples: int = DEFAULT_ANGLE_SAMPLES,
    xtol: float = 0.05,
) -> Calibration:
    """
    Bisect on the waist so a centred wire in the blocked-beam configuration
    loses `target` of the detected power.
    """
    grid = grid or GridSpec()
    centred = wire.moved_to(0.0)

    def excess(waist: float) -> float:
        trial = beams.with_waist(waist)
        return blocked_beam_loss(trial, centred, plane, grid, angle_samples).loss_fraction - target

    lo, hi = bounds
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo * f_hi > 0:
        raise CalibrationError(
            f"target loss {target} not bracketed by waists {bounds} "
            f"(losses {f_lo + target:.4g}, {f_hi + target:.4g})"
        )
    log.info("Calibrating waist for blocked-beam loss %.4g", target)
    waist = float(bisect(excess, lo, hi, xtol=xtol))

    calibrated = beams.with_waist(waist)
    blocked = blocked_beam_loss(calibrated, centred, plane, grid, angle_samples).loss_fraction
    bright = scan_wire(
        calibrated, wire, plane, [bright_fringe_near(calibrated, 0.0)], grid, angle_samples
    ).rows[0].loss_fraction
    log.info("Calibrated waist %.6g um: blocked %.4g, bright %.4g", waist, blocked, bright)
    return Calibration(waist=waist, blocked_loss=blocked, bright_loss=bright)
