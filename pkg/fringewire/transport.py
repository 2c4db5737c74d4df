"""
Monte Carlo single-photon ensembles through the crossing.

Each photon picks a source mode, may come close enough to the wire to
interact, may be lost to classical absorption (hybrid mode only) and finally
clicks one detector. Photons are split into two classes for complementarity
bookkeeping:

- free: never touch the wire; momentum conservation names the source (K = 1)
  and they keep the fringe-free Gaussian spread (V = 0);
- interacting: scattered by the wire; K follows from the wire's momentum
  record and V from where the wire can be said to sit.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import bisect
from scipy.special import erf
from scipy.stats import chi2 as chi2_dist

from .errors import ReportMismatchError
from .field import BeamPair, GridSpec
from .heisenberg import uncertainty_report
from .obstruction import DetectorPlane, WireSpec, scan_wire
from .quantum import (
    FREE_WIRE_SWITCH_PROBABILITY,
    Convention,
    MomentumRecord,
    Transfer,
    clamped_matrix,
    duality_check,
    which_way_K,
)
from .rng import PhotonStreams, shard_bounds

log = logging.getLogger(__name__)

DEFAULT_INTERACTING_FRACTION = 0.12
SYMMETRY_SIGMAS = 4.0


# ─────────────────────────────────────────────────────────────────────────────
# Domain types
# ─────────────────────────────────────────────────────────────────────────────

class EnsembleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    photon_count: int = Field(ge=1)
    source_split: float = Field(0.5, ge=0, le=1)
    interacting_fraction: float = Field(DEFAULT_INTERACTING_FRACTION, ge=0, le=1)
    wire: WireSpec | None = None
    seed: int = Field(0, ge=0, lt=2**64)
    beams: BeamPair = Field(default_factory=BeamPair)
    convention: Convention = "hadamard"
    interaction_mode: Literal["bernoulli", "spatial"] = "bernoulli"
    interaction_radius: float | None = Field(None, ge=0)
    loss_probability: float = Field(0.0, ge=0, le=1)
    shards: int = Field(1, ge=1)


class DetectorCounts(BaseModel):
    model_config = ConfigDict(frozen=True)

    detector_1: int = Field(ge=0)
    detector_2: int = Field(ge=0)
    lost: int = Field(ge=0)

    @property
    def detected(self) -> int:
        return self.detector_1 + self.detector_2

    @property
    def total(self) -> int:
        return self.detected + self.lost


class Subpopulation(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int
    switched: int
    K: float
    V: float
    total: float
    satisfied: bool


class RunReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    counts: DetectorCounts
    subpopulations: dict[str, Subpopulation]
    seed_echo: int

    @property
    def duality_satisfied(self) -> bool:
        return all(s.satisfied for s in self.subpopulations.values())


@dataclass(frozen=True)
class SymmetryTest:
    chi2: float
    p_value: float
    threshold: float
    passed: bool


@dataclass
class _Tally:
    detector_1: int = 0
    detector_2: int = 0
    lost: int = 0
    free: int = 0
    free_switched: int = 0
    interacting: int = 0
    interacting_switched: int = 0

    def __add__(self, other: "_Tally") -> "_Tally":
        return _Tally(*(a + b for a, b in zip(vars(self).values(), vars(other).values())))


# ─────────────────────────────────────────────────────────────────────────────
# Interaction probability
# ─────────────────────────────────────────────────────────────────────────────

def spatial_interacting_fraction(beams: BeamPair, center: float, radius: float) -> float:
    """Single-beam Gaussian power within `radius` of `center`."""
    scale = np.sqrt(2) / beams.waist
    return float(0.5 * (erf(scale * (center + radius)) - erf(scale * (center - radius))))


def calibrate_interaction_radius(beams: BeamPair, target: float) -> float:
    """Radius around the beam axis that holds `target` of the beam power."""
    if target <= 0:
        return 0.0
    hi = 4 * beams.waist
    if spatial_interacting_fraction(beams, 0.0, hi) <= target:
        return hi
    return float(bisect(
        lambda r: spatial_interacting_fraction(beams, 0.0, r) - target, 0.0, hi, xtol=1e-9
    ))


def interaction_probability(config: EnsembleConfig) -> float:
    if config.wire is None:
        return 0.0
    if config.interaction_mode == "bernoulli":
        return config.interacting_fraction
    radius = config.interaction_radius
    if radius is None:
        radius = calibrate_interaction_radius(config.beams, config.interacting_fraction)
    return spatial_interacting_fraction(config.beams, config.wire.center, radius)


# ─────────────────────────────────────────────────────────────────────────────
# Ensemble
# ─────────────────────────────────────────────────────────────────────────────

def _run_shard(config: EnsembleConfig, streams: PhotonStreams, start: int, stop: int,
               p_interact: float) -> _Tally:
    u = streams.uniforms(start, stop - start)
    source = (u[:, 0] >= config.source_split).astype(int)      # 0 → mode 1, 1 → mode 2
    interacting = u[:, 1] < p_interact
    lost = u[:, 2] < config.loss_probability

    # probability of leaving in mode 1
    p_mode1 = (source == 0).astype(float)
    if config.wire is not None and config.wire.clamped:
        matrix = clamped_matrix(config.convention)
        p_mode1 = np.where(interacting, np.abs(matrix[0, source]) ** 2, p_mode1)
        clicked = (u[:, 3] >= p_mode1).astype(int)
    elif config.wire is not None:
        switch = interacting & (u[:, 3] < FREE_WIRE_SWITCH_PROBABILITY)
        clicked = np.where(switch, 1 - source, source)
    else:
        clicked = (u[:, 3] >= p_mode1).astype(int)

    detected = ~lost
    switched = detected & (clicked != source)
    free = detected & ~interacting
    touched = detected & interacting
    return _Tally(
        detector_1=int(np.count_nonzero(detected & (clicked == 0))),
        detector_2=int(np.count_nonzero(detected & (clicked == 1))),
        lost=int(np.count_nonzero(lost)),
        free=int(np.count_nonzero(free)),
        free_switched=int(np.count_nonzero(free & switched)),
        interacting=int(np.count_nonzero(touched)),
        interacting_switched=int(np.count_nonzero(touched & switched)),
    )


def _subpopulation(count: int, switched: int, K: float, V: float) -> Subpopulation:
    record = duality_check(K, V)
    return Subpopulation(
        count=count, switched=switched, K=record.K, V=record.V,
        total=record.total, satisfied=record.satisfied,
    )


def _interacting_duality(config: EnsembleConfig) -> tuple[float, float]:
    wire = config.wire
    if wire.clamped:
        out = clamped_matrix(config.convention)[:, 0]
        clicks = (float(abs(out[0]) ** 2), float(abs(out[1]) ** 2))
        return which_way_K(MomentumRecord.erased(), clicks), 1.0

    # a readable recoil pins the wire only to within Δy ≥ l, so it cannot be
    # said to sit on a dark fringe: no fringe-forming visibility is credited
    report = uncertainty_report(config.beams)
    V = 0.0 if report.spans_fringe else 1.0
    return which_way_K(MomentumRecord.stored(Transfer.plus_dp), (0.5, 0.5)), V


def shard_workers(shards: int) -> int:
    """Thread count for `shards` shards, capped at the CPU count."""
    return max(1, min(shards, os.cpu_count() or 1))


def run_ensemble(config: EnsembleConfig, workers: int = 1) -> RunReport:
    """Simulate `photon_count` photons; bit-identical for a fixed seed."""
    streams = PhotonStreams(config.seed)
    p_interact = interaction_probability(config)
    bounds = shard_bounds(config.photon_count, config.shards)
    log.info("Running %d photons in %d shard(s), interaction probability %.4g",
             config.photon_count, len(bounds), p_interact)

    def shard(b: tuple[int, int]) -> _Tally:
        return _run_shard(config, streams, b[0], b[1], p_interact)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(shard, bounds))
    else:
        tallies = [shard(b) for b in bounds]
    tally = sum(tallies, _Tally())

    subpopulations = {}
    if tally.free:
        k_free = which_way_K(MomentumRecord.stored(Transfer.zero), (1.0, 0.0))
        subpopulations["free"] = _subpopulation(tally.free, tally.free_switched, k_free, 0.0)
    if tally.interacting:
        K, V = _interacting_duality(config)
        subpopulations["interacting"] = _subpopulation(
            tally.interacting, tally.interacting_switched, K, V
        )

    report = RunReport(
        counts=DetectorCounts(
            detector_1=tally.detector_1, detector_2=tally.detector_2, lost=tally.lost
        ),
        subpopulations=subpopulations,
        seed_echo=streams.seed,
    )
    log.info("Ensemble done: %d / %d / %d lost", tally.detector_1, tally.detector_2, tally.lost)
    return report


def hybrid_config(
    config: EnsembleConfig,
    plane: DetectorPlane,
    grid: GridSpec | None = None,
) -> EnsembleConfig:
    """Add classical wire absorption and diffraction loss to a pure run."""
    if config.wire is None:
        return config
    row = scan_wire(config.beams, config.wire, plane, [config.wire.center], grid).rows[0]
    return config.model_copy(update={"loss_probability": row.reported_loss})


# ─────────────────────────────────────────────────────────────────────────────
# Checks
# ─────────────────────────────────────────────────────────────────────────────

def _check_pairing(report: RunReport, config: EnsembleConfig) -> None:
    if report.seed_echo != config.seed:
        raise ReportMismatchError(
            f"report seed {report.seed_echo} does not match config seed {config.seed}"
        )
    if report.counts.total != config.photon_count:
        raise ReportMismatchError(
            f"report holds {report.counts.total} photons, config asks for {config.photon_count}"
        )


def detector_symmetry_test(report: RunReport, config: EnsembleConfig) -> SymmetryTest:
    """χ² of the two detector counts against an even split, 4σ band."""
    _check_pairing(report, config)
    if config.wire is None or not config.wire.clamped or config.source_split != 0.5:
        raise ReportMismatchError("symmetry test needs a clamped wire and an even source split")

    n1, n2 = report.counts.detector_1, report.counts.detector_2
    detected = n1 + n2
    chi2 = (n1 - n2) ** 2 / detected if detected else 0.0
    threshold = SYMMETRY_SIGMAS**2
    return SymmetryTest(
        chi2=float(chi2),
        p_value=float(chi2_dist.sf(chi2, df=1)),
        threshold=threshold,
        passed=chi2 <= threshold,
    )


def count_conservation_check(with_wire: RunReport, without_wire: RunReport) -> float:
    """Relative change of the detected photon count caused by the wire."""
    n = with_wire.counts.total
    if n != without_wire.counts.total:
        raise ReportMismatchError(
            f"reports differ in photon count ({n} vs {without_wire.counts.total})"
        )
    return abs(with_wire.counts.detected - without_wire.counts.detected) / n
