"""
Position uncertainty of a wire whose recoil momentum is read out.

Momenta carry Planck's constant as the sympy symbol ``H`` (units h/μm), and
float inputs are converted to their exact rational values, so
Δy = h/Δp_y and l = λ/α come out as the same exact number.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from .field import BeamPair

H = sympy.Symbol("h", positive=True)


@dataclass(frozen=True)
class UncertaintyReport:
    photon_momentum: sympy.Expr
    deflection_momentum: sympy.Expr
    wire_position_uncertainty: sympy.Expr
    fringe_spacing: sympy.Expr
    spans_fringe: bool

    @property
    def ratio(self) -> sympy.Expr:
        """Δy / l, exactly 1 on the whole valid domain."""
        return sympy.simplify(self.wire_position_uncertainty / self.fringe_spacing)

    def as_dict(self) -> dict:
        return {
            "photon_momentum_h_per_um": float(self.photon_momentum / H),
            "deflection_momentum_h_per_um": float(self.deflection_momentum / H),
            "wire_position_uncertainty_um": float(self.wire_position_uncertainty),
            "fringe_spacing_um": float(self.fringe_spacing),
            "uncertainty_over_spacing": float(self.ratio),
            "spans_fringe": self.spans_fringe,
        }


def _exact(value: float) -> sympy.Rational:
    return sympy.Rational(float(value))


def photon_momentum(wavelength: float) -> sympy.Expr:
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return H / _exact(wavelength)


def deflection_momentum(wavelength: float, crossing_angle: float) -> sympy.Expr:
    """Δp_y ≈ p·α = h·α/λ for a small deflection α."""
    if crossing_angle < 0:
        raise ValueError(f"crossing angle must not be negative, got {crossing_angle}")
    return photon_momentum(wavelength) * _exact(crossing_angle)


def uncertainty_report(beams: BeamPair) -> UncertaintyReport:
    p = photon_momentum(beams.wavelength)
    dp = deflection_momentum(beams.wavelength, beams.crossing_angle)
    dy = H / dp
    l = _exact(beams.wavelength) / _exact(beams.crossing_angle)
    return UncertaintyReport(
        photon_momentum=p,
        deflection_momentum=dp,
        wire_position_uncertainty=dy,
        fringe_spacing=l,
        spans_fringe=bool(dy >= l),
    )
