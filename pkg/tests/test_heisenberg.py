import numpy as np
import pytest
import sympy

from fringewire.field import BeamPair, fringe_spacing
from fringewire.heisenberg import H, deflection_momentum, photon_momentum, uncertainty_report


def test_deflection_momentum_formula():
    assert float(deflection_momentum(0.5, 0.01) / H) == pytest.approx(0.02)


def test_zero_angle_transfers_nothing():
    assert deflection_momentum(0.633, 0.0) == 0


def test_deflection_linear_in_angle():
    assert deflection_momentum(0.633, 0.02) == 2 * deflection_momentum(0.633, 0.01)


@pytest.mark.parametrize("wavelength, angle", [(0.0, 0.01), (-0.5, 0.01), (0.5, -0.01)])
def test_rejects_nonpositive_inputs(wavelength, angle):
    with pytest.raises(ValueError):
        deflection_momentum(wavelength, angle)


def test_photon_momentum_carries_h():
    assert photon_momentum(0.5) == 2 * H


def test_default_report():
    report = uncertainty_report(BeamPair())
    values = report.as_dict()
    assert values["wire_position_uncertainty_um"] == pytest.approx(63.3)
    assert values["fringe_spacing_um"] == pytest.approx(63.3)
    assert values["uncertainty_over_spacing"] == 1.0
    assert report.spans_fringe is True


def test_uncertainty_saturates_bound():
    report = uncertainty_report(BeamPair())
    assert sympy.simplify(report.wire_position_uncertainty * report.deflection_momentum - H) == 0


def test_ratio_exactly_one_over_parameter_sweep():
    rng = np.random.default_rng(42)
    for wavelength, angle in zip(rng.uniform(0.2, 2.0, 1000), rng.uniform(1e-4, 0.19, 1000)):
        beams = BeamPair(wavelength=wavelength, crossing_angle=angle, waist=1000.0)
        report = uncertainty_report(beams)
        assert report.ratio == 1
        assert report.spans_fringe


def test_spacing_agrees_with_field_module():
    rng = np.random.default_rng(8)
    for wavelength, angle in zip(rng.uniform(0.2, 2.0, 50), rng.uniform(1e-4, 0.19, 50)):
        beams = BeamPair(wavelength=wavelength, crossing_angle=angle, waist=1000.0)
        exact = float(uncertainty_report(beams).fringe_spacing)
        assert exact == pytest.approx(fringe_spacing(beams), rel=1e-12)
