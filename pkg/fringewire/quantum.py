"""
Single-photon two-mode scattering.

The photon lives in span{|1⟩₁, |1⟩₂}, the momentum modes p₁ and p₂ of the two
beams. A free crossing conserves momentum and leaves the amplitudes alone. A
wire at a dark fringe can supply Δp = p₂ − p₁:

- clamped to the apparatus, no momentum record survives and the photon leaves
  in a coherent superposition (unitary mode mixing);
- free, the recoil could be read, so the interaction acts as a momentum
  measurement and the photon leaves in one definite mode.

The literal interaction operator with two `+` exchange terms is not unitary.
The default completion is the real Hadamard-type map
(c1, c2) ↦ ((c1 + c2)/√2, (c1 − c2)/√2), which sends |1⟩₁ to (|1⟩₁ + |1⟩₂)/√2
exactly and is its own inverse. The `symmetric` convention is the Hermitian
i-phase beam splitter (c1 − i c2, i c1 − c2)/√2: it sends |1⟩₁ to
(|1⟩₁ + i|1⟩₂)/√2, so populations match and it is also its own inverse, but
the mode-2 amplitude carries a phase i.
"""

from __future__ import annotations

import enum
import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DualityRangeError, NormalizationError
from .obstruction import WireSpec

log = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9
DUALITY_TOLERANCE = 1e-9
FREE_WIRE_SWITCH_PROBABILITY = 0.5

Convention = Literal["hadamard", "symmetric"]

_SQRT_HALF = 1 / np.sqrt(2)
_MATRICES: dict[str, np.ndarray] = {
    "hadamard": _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex),
    "symmetric": _SQRT_HALF * np.array([[1, -1j], [1j, -1]], dtype=complex),
}


# ─────────────────────────────────────────────────────────────────────────────
# Domain types
# ─────────────────────────────────────────────────────────────────────────────

class TwoModeState(BaseModel):
    model_config = ConfigDict(frozen=True)

    c1: complex
    c2: complex

    @model_validator(mode="after")
    def _normalized(self) -> "TwoModeState":
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise NormalizationError(f"|c1|^2 + |c2|^2 = {norm:.12g}, expected 1")
        return self

    @classmethod
    def mode(cls, index: int) -> "TwoModeState":
        """Basis state |1⟩₁ (index 1) or |1⟩₂ (index 2)."""
        return cls(c1=1.0 if index == 1 else 0.0, c2=1.0 if index == 2 else 0.0)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "TwoModeState":
        return cls(c1=complex(vector[0]), c2=complex(vector[1]))

    def vector(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=complex)

    def probabilities(self) -> tuple[float, float]:
        return abs(self.c1) ** 2, abs(self.c2) ** 2


class RecordKind(str, enum.Enum):
    erased = "erased"
    stored = "stored"


class Transfer(str, enum.Enum):
    zero = "zero"
    plus_dp = "plus_dp"
    minus_dp = "minus_dp"


class MomentumRecord(BaseModel):
    """What the wire remembers about the momentum it supplied."""

    model_config = ConfigDict(frozen=True)

    kind: RecordKind
    transfer: Transfer = Transfer.zero

    @classmethod
    def erased(cls) -> "MomentumRecord":
        return cls(kind=RecordKind.erased)

    @classmethod
    def stored(cls, transfer: Transfer) -> "MomentumRecord":
        return cls(kind=RecordKind.stored, transfer=transfer)


class DualityRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    K: float = Field(ge=0, le=1)
    V: float = Field(ge=0, le=1)
    total: float
    satisfied: bool
    excluded: bool = False


class ScenarioRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: str
    K: float
    V: float
    total: float
    satisfied: bool
    excluded: bool = False


# ─────────────────────────────────────────────────────────────────────────────
# State maps
# ─────────────────────────────────────────────────────────────────────────────

def clamped_matrix(convention: Convention = "hadamard") -> np.ndarray:
    return _MATRICES[convention].copy()


def _require_normalized(state: TwoModeState) -> None:
    p1, p2 = state.probabilities()
    if abs(p1 + p2 - 1.0) > NORMALIZATION_TOLERANCE:
        raise NormalizationError(f"|c1|^2 + |c2|^2 = {p1 + p2:.12g}, expected 1")


def free_propagate(state: TwoModeState) -> TwoModeState:
    """Momentum-conserving free crossing: no mode mixing."""
    _require_normalized(state)
    return TwoModeState(c1=state.c1, c2=state.c2)


def wire_interact(
    state: TwoModeState,
    wire: WireSpec,
    rng: np.random.Generator | int | None = None,
    convention: Convention = "hadamard",
) -> tuple[TwoModeState, MomentumRecord]:
    """
    Scatter a photon off a wire sitting on a dark fringe.

    Clamped wires apply the unitary mode mixing and erase the record. Free
    wires sample a branch: the incoming mode by the Born rule, then keep or
    switch with probability ½ each, storing the momentum transfer.
    """
    _require_normalized(state)

    if wire.clamped:
        out = clamped_matrix(convention) @ state.vector()
        return TwoModeState.from_vector(out), MomentumRecord.erased()

    rng = np.random.default_rng(rng)
    p1, _ = state.probabilities()
    incoming = 1 if rng.random() < p1 else 2
    if rng.random() < FREE_WIRE_SWITCH_PROBABILITY:
        outgoing = 3 - incoming
        transfer = Transfer.plus_dp if incoming == 1 else Transfer.minus_dp
    else:
        outgoing = incoming
        transfer = Transfer.zero
    return TwoModeState.mode(outgoing), MomentumRecord.stored(transfer)


def detect(state: TwoModeState, rng: np.random.Generator | int | None = None) -> int:
    """Born-rule click: detector 1 with probability |c1|², else detector 2."""
    _require_normalized(state)
    rng = np.random.default_rng(rng)
    p1, _ = state.probabilities()
    return 1 if rng.random() < p1 else 2


# ─────────────────────────────────────────────────────────────────────────────
# Complementarity bookkeeping
# ─────────────────────────────────────────────────────────────────────────────

def which_way_K(record: MomentumRecord, click_distribution: tuple[float, float]) -> float:
    """
    Which-way information. A stored record lets momentum conservation trace
    the photon back to its source (K = 1). With the record erased only the
    predictability |P1 − P2| of the clicks remains.
    """
    p1, p2 = click_distribution
    for p in (p1, p2):
        if not -NORMALIZATION_TOLERANCE <= p <= 1.0 + NORMALIZATION_TOLERANCE:
            raise NormalizationError(f"click probability {p:.12g} is outside [0, 1]")
    if abs(p1 + p2 - 1.0) > NORMALIZATION_TOLERANCE:
        raise NormalizationError(f"click probabilities sum to {p1 + p2:.12g}, expected 1")
    if record.kind is RecordKind.stored:
        return 1.0
    return float(min(abs(p1 - p2), 1.0))


def duality_check(K: float, V: float, excluded: bool = False) -> DualityRecord:
    for name, value in (("K", K), ("V", V)):
        if not 0.0 <= value <= 1.0:
            raise DualityRangeError(f"{name} = {value} is outside [0, 1]")
    total = K * K + V * V
    satisfied = total <= 1.0 + DUALITY_TOLERANCE
    if not satisfied and not excluded:
        log.error("Complementarity violated: K=%.6g V=%.6g K^2+V^2=%.6g", K, V, total)
    return DualityRecord(K=K, V=V, total=total, satisfied=satisfied, excluded=excluded)


def scenario_table(convention: Convention = "hadamard") -> list[ScenarioRow]:
    """
    The four canonical cases. K follows from the maps above; V is assigned by
    where the photons end up (uniform Gaussian spread: 0, fringe-forming: 1).
    """
    source = TwoModeState.mode(1)
    dark_wire = WireSpec(clamped=True)

    free_out = free_propagate(source)
    k_free = which_way_K(MomentumRecord.stored(Transfer.zero), free_out.probabilities())

    # photons absorbed on the screen are localized within a fringe: their
    # momentum spread exceeds p₂ − p₁ and both sources are equally likely
    k_screen = which_way_K(MomentumRecord.erased(), (0.5, 0.5))

    clamped_out, erased = wire_interact(source, dark_wire, convention=convention)
    k_clamped = which_way_K(erased, clamped_out.probabilities())

    readable = MomentumRecord.stored(Transfer.plus_dp)
    k_readable = which_way_K(readable, clamped_out.probabilities())

    cases = [
        ("free_crossing", k_free, 0.0, False),
        ("opaque_screen", k_screen, 1.0, False),
        ("clamped_wire_interacting", k_clamped, 1.0, False),
        ("readable_wire_counterfactual", k_readable, 1.0, True),
    ]
    rows = []
    for name, K, V, excluded in cases:
        record = duality_check(K, V, excluded=excluded)
        rows.append(ScenarioRow(
            scenario=name,
            K=record.K,
            V=record.V,
            total=record.total,
            satisfied=record.satisfied,
            excluded=record.excluded,
        ))
    return rows
