"""
Run configuration: one flat set of keys shared by every scenario.

Sources, lowest precedence first: built-in defaults, a key=value file
(`--config`), then `--key value` flags. Every key is validated before any
computation starts; unknown keys are rejected.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .field import BeamPair, GridSpec, dark_fringe_near, fringe_spacing
from .obstruction import DEFAULT_ANGLE_SAMPLES, DetectorPlane, WireSpec, default_scan_positions
from .transport import EnsembleConfig

Scenario = Literal["fringes", "scan", "blocked", "comb", "photons", "duality", "uncertainty"]
SCENARIOS: tuple[str, ...] = get_args(Scenario)
WIRE_SCENARIOS = ("scan", "blocked", "comb")

STDOUT = "-"


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: Scenario

    # beams
    wavelength: float = 0.633
    crossing_angle: float = 0.01
    waist: float = 500.0
    amplitude_ratio: float = 1.0
    relative_phase: float = 0.0

    # sampling grid
    grid_step: float = Field(0.5, gt=0)
    window_half_width: float | None = Field(None, gt=0)

    # wire (centre defaults to the dark fringe nearest the axis)
    wire_center: float | None = None
    wire_diameter: float = Field(17.0, gt=0)
    wire_clamped: bool = True
    wire_present: bool = True

    # detectors
    acceptance_half_width: float | None = Field(None, gt=0)
    angle_samples: int = Field(DEFAULT_ANGLE_SAMPLES, ge=32)

    # scan
    scan_positions: list[float] | None = None
    scan_periods: float = Field(2.0, gt=0)
    scan_steps_per_period: int = Field(40, ge=4)

    # comb
    misalignment: float = 0.0
    misalignment_sweep: list[float] | None = None

    # blocked-beam calibration
    calibrate_target: float | None = Field(None, gt=0, lt=1)
    calibrate_min_waist: float = Field(100.0, gt=0)
    calibrate_max_waist: float = Field(1000.0, gt=0)

    # photon ensemble
    photon_count: int = Field(100_000, ge=1)
    source_split: float = Field(0.5, ge=0, le=1)
    interacting_fraction: float = Field(0.12, ge=0, le=1)
    interaction_mode: Literal["bernoulli", "spatial"] = "bernoulli"
    interaction_radius: float | None = Field(None, ge=0)
    convention: Literal["hadamard", "symmetric"] = "hadamard"
    hybrid: bool = False
    shards: int = Field(1, ge=1)
    counterfactual_readable_wire: bool = False

    # output
    output_format: Literal["csv", "json"] = "json"
    output_path: str = STDOUT
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("scan_positions", "misalignment_sweep", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item for item in (part.strip() for part in value.split(",")) if item]
        return value

    @field_validator("scan_positions")
    @classmethod
    def _non_empty(cls, value: list[float] | None) -> list[float] | None:
        if value is not None and not value:
            raise ValueError("scan_positions must not be empty")
        return value

    @model_validator(mode="after")
    def _physics(self) -> "RunConfig":
        beams = self.beams()
        spacing = fringe_spacing(beams)
        if self.grid_step > spacing / 8:
            raise ValueError(f"grid_step {self.grid_step} um exceeds l/8 = {spacing / 8:.6g} um")
        if self.uses_wire:
            if self.wire_diameter >= spacing:
                raise ValueError(
                    f"wire_diameter {self.wire_diameter} um must be below the fringe "
                    f"spacing {spacing:.6g} um"
                )
            half = self.grid().window(beams)[1]
            if abs(self.wire().center) + 0.5 * self.wire_diameter > half:
                raise ValueError(f"wire_center {self.wire().center} um lies outside the window")
        if self.uses_detectors:
            self.plane()
        if self.calibrate_min_waist >= self.calibrate_max_waist:
            raise ValueError("calibrate_min_waist must be below calibrate_max_waist")
        return self

    @property
    def uses_wire(self) -> bool:
        if self.scenario == "photons":
            return self.wire_present
        return self.scenario in WIRE_SCENARIOS

    @property
    def uses_detectors(self) -> bool:
        return self.scenario in WIRE_SCENARIOS or (self.scenario == "photons" and self.hybrid)

    # ── domain views ──────────────────────────────────────────────────────────

    def beams(self) -> BeamPair:
        return BeamPair(
            wavelength=self.wavelength,
            crossing_angle=self.crossing_angle,
            waist=self.waist,
            amplitude_ratio=self.amplitude_ratio,
            relative_phase=self.relative_phase,
        )

    def grid(self) -> GridSpec:
        return GridSpec(step=self.grid_step, half_width=self.window_half_width)

    def wire(self) -> WireSpec:
        centre = self.wire_center
        if centre is None:
            centre = dark_fringe_near(self.beams(), 0.0)
        return WireSpec(center=centre, diameter=self.wire_diameter, clamped=self.wire_clamped)

    def plane(self) -> DetectorPlane:
        return DetectorPlane.for_beams(self.beams(), self.acceptance_half_width)

    def positions(self) -> list[float]:
        if self.scan_positions is not None:
            return list(self.scan_positions)
        return default_scan_positions(
            self.beams(), self.scan_periods, self.scan_steps_per_period
        ).tolist()

    def ensemble(self) -> EnsembleConfig:
        return EnsembleConfig(
            photon_count=self.photon_count,
            source_split=self.source_split,
            interacting_fraction=self.interacting_fraction,
            wire=self.wire() if self.wire_present else None,
            seed=self.seed,
            beams=self.beams(),
            convention=self.convention,
            interaction_mode=self.interaction_mode,
            interaction_radius=self.interaction_radius,
            shards=self.shards,
        )


# ─────────────────────────────────────────────────────────────────────────────
# Loading
# ─────────────────────────────────────────────────────────────────────────────

def normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[normalize_key(key)] = value.strip()
    return values


def build_config(scenario: str, values: dict[str, Any]) -> RunConfig:
    """Validate the merged key set; failures name the offending keys."""
    try:
        return RunConfig(**{**values, "scenario": scenario})
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(problems) from exc
