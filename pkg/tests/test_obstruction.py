"""Tests for wire masks, Fraunhofer propagation and detector scans."""

import numpy as np
import pytest
from scipy.special import erf

from fringewire.errors import (
    UnresolvedAcceptanceError,
    WireOutsideWindowError,
    WireTooThickError,
)
from fringewire.field import (
    ComplexField,
    bright_fringe_near,
    build_field,
    dark_fringe_near,
    fringe_spacing,
    intensity,
)
from fringewire.obstruction import (
    DetectorPlane,
    WireComb,
    WireSpec,
    apply_mask,
    blocked_beam_loss,
    calibrate_waist,
    comb_at_dark_fringes,
    comb_sweep,
    default_scan_positions,
    detector_counts,
    farfield,
    scan_period,
    scan_wire,
    wire_coverage,
    wire_field,
)


def _loss_at(result, y):
    index = int(np.argmin(np.abs(result.positions - y)))
    return result.rows[index].loss_fraction


@pytest.fixture
def default_scan(beams, plane):
    return scan_wire(beams, WireSpec(), plane, default_scan_positions(beams))


class TestMask:
    def test_empty_comb_is_identity(self, beams):
        field = build_field(beams)
        np.testing.assert_array_equal(apply_mask(field, WireComb()).samples, field.samples)

    def test_wire_over_whole_window(self):
        field = ComplexField(np.ones(33, dtype=complex), origin=-16.0, spacing=1.0, wavelength=0.633)
        comb = WireComb(wires=[WireSpec(center=0.0, diameter=33.0)])
        assert not apply_mask(field, comb).samples.any()

    def test_partial_cells_weighted(self):
        field = ComplexField(np.ones(33, dtype=complex), origin=-16.0, spacing=1.0, wavelength=0.633)
        masked = apply_mask(field, WireComb(wires=[WireSpec(center=0.0, diameter=2.0)]))
        # cells at ±1 are half covered, the centre cell fully
        np.testing.assert_allclose(masked.samples[15:18].real, [0.5, 0.0, 0.5])
        assert masked.samples[14] == 1.0

    def test_wire_on_null_removes_little_power(self, beams_50):
        field = build_field(beams_50)
        wire = WireSpec(center=dark_fringe_near(beams_50, 0.0), diameter=17.0)
        cover = wire_coverage(field, WireComb(wires=[wire]))
        removed = np.sum(intensity(field) * cover) * field.spacing / field.power
        assert 0 < removed < 0.005

    def test_wire_outside_window(self, beams):
        field = build_field(beams)
        with pytest.raises(WireOutsideWindowError):
            apply_mask(field, WireComb(wires=[WireSpec(center=5000.0)]))

    def test_overlapping_wires_rejected(self):
        with pytest.raises(ValueError):
            WireComb(wires=[WireSpec(center=0.0), WireSpec(center=5.0)])

    def test_thick_wire_rejected(self, beams, plane):
        with pytest.raises(WireTooThickError):
            scan_wire(beams, WireSpec(diameter=70.0), plane, [0.0])


class TestFarField:
    def test_equal_beams_symmetric_lobes(self, beams, plane):
        far = farfield(build_field(beams), plane.angle_grid())
        c1, c2 = detector_counts(far, plane)
        assert c1 == pytest.approx(c2, rel=1e-6)

    def test_lobes_at_beam_directions(self, beams):
        angles = np.linspace(-beams.crossing_angle, beams.crossing_angle, 801)
        far = farfield(build_field(beams), angles)
        power = np.abs(far.amplitudes) ** 2
        left, right = angles < 0, angles > 0
        assert angles[left][np.argmax(power[left])] == pytest.approx(-beams.crossing_angle / 2, abs=5e-5)
        assert angles[right][np.argmax(power[right])] == pytest.approx(beams.crossing_angle / 2, abs=5e-5)

    def test_single_beam_reaches_one_detector(self, beams, plane):
        far = farfield(build_field(beams.single_beam()), plane.angle_grid())
        c1, c2 = detector_counts(far, plane)
        assert c2 / c1 < 1e-4

    def test_zero_field(self, plane):
        field = ComplexField(np.zeros(64, dtype=complex), origin=-32.0, spacing=1.0, wavelength=0.633)
        assert detector_counts(farfield(field, plane.angle_grid()), plane) == (0.0, 0.0)

    def test_unresolved_acceptance(self, beams, plane):
        far = farfield(build_field(beams), plane.angle_grid(16))
        with pytest.raises(UnresolvedAcceptanceError):
            detector_counts(far, plane)

    def test_parseval_without_mask(self, beams, plane):
        field = build_field(beams)
        c1, c2 = detector_counts(farfield(field, plane.angle_grid()), plane)
        assert c1 + c2 == pytest.approx(field.power, rel=1e-6)

    def test_mask_only_removes_power(self, beams, plane):
        field = build_field(beams)
        comb = WireComb(wires=[WireSpec(center=bright_fringe_near(beams, 100.0))])
        unmasked = sum(detector_counts(farfield(field, plane.angle_grid()), plane))
        masked = sum(detector_counts(farfield(apply_mask(field, comb), plane.angle_grid()), plane))
        assert masked <= unmasked * (1 + 1e-8)

    def test_babinet_identity(self, beams, rng):
        field = build_field(beams)
        angles = np.linspace(-beams.crossing_angle, beams.crossing_angle, 65)
        full = farfield(field, angles)
        scale = np.abs(full.amplitudes).max()
        for centre in rng.uniform(-1500.0, 1500.0, size=10):
            comb = WireComb(wires=[WireSpec(center=float(centre))])
            masked = farfield(apply_mask(field, comb), angles)
            complement = farfield(wire_field(field, comb), angles)
            np.testing.assert_allclose(
                masked.amplitudes, (full - complement).amplitudes, rtol=0, atol=1e-10 * scale
            )

    def test_acceptances_follow_beams(self, beams):
        plane = DetectorPlane.for_beams(beams)
        lo, hi = plane.acceptance_1
        assert lo < beams.crossing_angle / 2 < hi
        lo, hi = plane.acceptance_2
        assert lo < -beams.crossing_angle / 2 < hi

    def test_overlapping_acceptances_rejected(self):
        with pytest.raises(ValueError):
            DetectorPlane(acceptance_1=(-0.001, 0.004), acceptance_2=(-0.004, 0.001))


class TestScan:
    def test_no_wire_elsewhere_means_no_loss(self, beams, plane):
        far_away = 3.5 * beams.waist
        row = scan_wire(beams, WireSpec(), plane, [far_away]).rows[0]
        assert abs(row.loss_fraction) < 1e-6

    def test_loss_periodic_in_fringe_spacing(self, beams, default_scan):
        step = fringe_spacing(beams) / 40
        assert scan_period(default_scan) == pytest.approx(fringe_spacing(beams), abs=step)

    def test_dark_fringes_lose_little(self, beams, default_scan):
        l = fringe_spacing(beams)
        dark = [_loss_at(default_scan, y) for y in (-1.5 * l, -0.5 * l, 0.5 * l, 1.5 * l)]
        bright = [_loss_at(default_scan, y) for y in (-l, 0.0, l)]
        assert max(dark) < 0.1 * min(bright)

    def test_maximum_at_bright_fringe(self, beams, default_scan):
        l = fringe_spacing(beams)
        peak = default_scan.positions[int(np.argmax(default_scan.losses))]
        nearest_bright = l * np.round(peak / l)
        assert abs(peak - nearest_bright) <= l / 40 + 1e-9

    def test_loss_in_range(self, default_scan):
        assert np.all(default_scan.losses >= -1e-9)
        assert np.all(default_scan.losses <= 1.0)

    def test_reported_components(self, default_scan):
        for row in default_scan.rows:
            assert row.reported_loss >= 0
            assert row.absorbed_fraction >= 0
            assert row.diffracted_fraction == pytest.approx(row.loss_fraction - row.absorbed_fraction)

    def test_threaded_scan_matches_serial(self, beams, plane):
        positions = default_scan_positions(beams, periods=0.5, steps_per_period=8)
        serial = scan_wire(beams, WireSpec(), plane, positions)
        threaded = scan_wire(beams, WireSpec(), plane, positions, workers=4)
        assert serial.rows == threaded.rows

    def test_empty_positions(self, beams, plane):
        with pytest.raises(ValueError):
            scan_wire(beams, WireSpec(), plane, [])


class TestBlockedBeam:
    def test_far_wire(self, beams, plane):
        row = blocked_beam_loss(beams, WireSpec(center=3.5 * beams.waist), plane)
        assert abs(row.loss_fraction) < 1e-6

    def test_centred_wire_absorption_matches_gaussian_integral(self, beams, plane):
        wire = WireSpec(center=0.0)
        row = blocked_beam_loss(beams, wire, plane)
        covered = erf(np.sqrt(2) * 0.5 * wire.diameter / beams.waist)
        assert row.absorbed_fraction == pytest.approx(covered, rel=1e-3)
        assert row.loss_fraction > row.absorbed_fraction

    def test_independent_of_fringe_phase(self, beams, plane):
        wire = WireSpec(center=20.0)
        base = blocked_beam_loss(beams, wire, plane).loss_fraction
        shifted = beams.model_copy(update={"relative_phase": 1.3})
        assert blocked_beam_loss(shifted, wire, plane).loss_fraction == pytest.approx(base, rel=1e-12)

    def test_smooth_in_position(self, beams, plane):
        l = fringe_spacing(beams)
        losses = [
            blocked_beam_loss(beams, WireSpec(center=y), plane).loss_fraction
            for y in np.arange(0.0, 2 * l, l / 8)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_calibration(self, beams, plane):
        calibration = calibrate_waist(0.08, beams, WireSpec(), plane)
        assert calibration.blocked_loss == pytest.approx(0.08, abs=1e-4)
        assert calibration.bright_loss > calibration.blocked_loss
        # regression constants at the default geometry
        assert calibration.waist == pytest.approx(298.495, abs=0.1)
        assert calibration.bright_loss == pytest.approx(0.149673, abs=1e-4)


class TestComb:
    def test_comb_below_single_bright_wire(self, beams, plane):
        comb = comb_at_dark_fringes(beams, plane)
        assert len(comb.rows) == 1
        assert comb.wire_count > 10
        bright = scan_wire(beams, WireSpec(), plane, [0.0]).rows[0].loss_fraction
        assert comb.rows[0].loss_fraction < bright

    def test_comb_loss_regression(self, beams, plane):
        loss = comb_at_dark_fringes(beams, plane).rows[0].loss_fraction
        assert loss == pytest.approx(0.0605936, abs=1e-6)

    def test_comb_loss_matches_slit_estimate(self, beams, plane):
        # central-order power left by opaque wires of width d every l
        f = WireSpec().diameter / fringe_spacing(beams)
        estimate = 1 - (1 - f + f * np.sinc(f)) ** 2
        loss = comb_at_dark_fringes(beams, plane).rows[0].loss_fraction
        assert loss == pytest.approx(estimate, rel=0.02)

    def test_misalignment_grows_loss(self, beams, plane):
        l = fringe_spacing(beams)
        sweep = [0.0, l / 16, l / 8, 3 * l / 16, l / 4]
        losses = comb_sweep(beams, plane, sweep).losses
        assert np.all(np.diff(losses) >= 0)

    def test_bright_placement_is_worst(self, beams, plane):
        l = fringe_spacing(beams)
        sweep = [0.0, l / 8, l / 4, 3 * l / 8, l / 2]
        losses = comb_sweep(beams, plane, sweep).losses
        assert int(np.argmax(losses)) == len(sweep) - 1

    def test_wire_count_fixed_across_sweep(self, beams, plane):
        l = fringe_spacing(beams)
        result = comb_sweep(beams, plane, [-l / 2, 0.0, l / 2])
        assert result.wire_count == comb_sweep(beams, plane, [l / 2]).wire_count
