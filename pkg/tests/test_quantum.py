"""Tests for two-mode scattering, detection and complementarity bookkeeping."""

import numpy as np
import pytest

from fringewire.errors import DualityRangeError, NormalizationError
from fringewire.obstruction import WireSpec
from fringewire.quantum import (
    MomentumRecord,
    RecordKind,
    Transfer,
    TwoModeState,
    clamped_matrix,
    detect,
    duality_check,
    free_propagate,
    scenario_table,
    wire_interact,
    which_way_K,
)

CONVENTIONS = ["hadamard", "symmetric"]
HALF = 1 / np.sqrt(2)


def _random_states(rng, n):
    raw = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    return raw / np.linalg.norm(raw, axis=0)


class TestTwoModeState:
    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            TwoModeState(c1=1.0, c2=1.0)

    def test_basis_states(self):
        assert TwoModeState.mode(1).probabilities() == (1.0, 0.0)
        assert TwoModeState.mode(2).probabilities() == (0.0, 1.0)


class TestFreePropagate:
    @pytest.mark.parametrize("c1, c2", [(1, 0), (0, 1), (0.6, 0.8j)])
    def test_identity(self, c1, c2):
        state = TwoModeState(c1=c1, c2=c2)
        out = free_propagate(state)
        assert (out.c1, out.c2) == (state.c1, state.c2)


class TestClampedWire:
    def test_equal_split_from_mode_one(self):
        out, record = wire_interact(TwoModeState.mode(1), WireSpec(clamped=True))
        assert out.c1 == pytest.approx(HALF, abs=1e-15)
        assert out.c2 == pytest.approx(HALF, abs=1e-15)
        assert record.kind is RecordKind.erased

    def test_two_wires_undo_each_other(self):
        superposed = TwoModeState(c1=HALF, c2=HALF)
        out, _ = wire_interact(superposed, WireSpec(clamped=True))
        assert out.c1 == pytest.approx(1.0, abs=1e-12)
        assert out.c2 == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_convention_phase(self):
        out, _ = wire_interact(TwoModeState.mode(1), WireSpec(clamped=True), convention="symmetric")
        assert out.c1 == pytest.approx(HALF, abs=1e-15)
        assert out.c2 == pytest.approx(1j * HALF, abs=1e-15)
        assert out.probabilities() == pytest.approx((0.5, 0.5))

    @pytest.mark.parametrize("convention", CONVENTIONS)
    def test_unitary(self, convention, rng):
        states = _random_states(rng, 10_000)
        out = clamped_matrix(convention) @ states
        np.testing.assert_allclose(np.sum(np.abs(out) ** 2, axis=0), 1.0, atol=1e-12)

    @pytest.mark.parametrize("convention", CONVENTIONS)
    def test_self_inverse(self, convention, rng):
        matrix = clamped_matrix(convention)
        states = _random_states(rng, 10_000)
        np.testing.assert_allclose(matrix @ (matrix @ states), states, atol=1e-12)

    @pytest.mark.parametrize("convention", CONVENTIONS)
    def test_state_api_round_trip(self, convention, rng):
        for c1, c2 in _random_states(rng, 50).T:
            state = TwoModeState(c1=c1, c2=c2)
            once, _ = wire_interact(state, WireSpec(), convention=convention)
            twice, _ = wire_interact(once, WireSpec(), convention=convention)
            assert twice.c1 == pytest.approx(state.c1, abs=1e-12)
            assert twice.c2 == pytest.approx(state.c2, abs=1e-12)


class TestFreeWire:
    def test_branch_statistics(self):
        rng = np.random.default_rng(11)
        wire = WireSpec(clamped=False)
        n = 100_000
        switched = 0
        for _ in range(n):
            out, record = wire_interact(TwoModeState.mode(1), wire, rng)
            assert record.kind is RecordKind.stored
            if out.c2 == 1:
                assert record.transfer is Transfer.plus_dp
                switched += 1
            else:
                assert record.transfer is Transfer.zero
        sigma = np.sqrt(0.25 * n)
        assert abs(switched - n / 2) <= 3 * sigma

    def test_switch_from_mode_two_gives_minus_transfer(self):
        rng = np.random.default_rng(3)
        transfers = {wire_interact(TwoModeState.mode(2), WireSpec(clamped=False), rng)[1].transfer
                     for _ in range(200)}
        assert transfers == {Transfer.zero, Transfer.minus_dp}

    def test_seeded_reproducible(self):
        first = wire_interact(TwoModeState(c1=HALF, c2=HALF), WireSpec(clamped=False), 5)
        second = wire_interact(TwoModeState(c1=HALF, c2=HALF), WireSpec(clamped=False), 5)
        assert first == second


class TestDetect:
    def test_certain_outcomes(self):
        rng = np.random.default_rng(0)
        assert all(detect(TwoModeState.mode(1), rng) == 1 for _ in range(1000))
        assert all(detect(TwoModeState.mode(2), rng) == 2 for _ in range(1000))

    def test_born_rule_equal_amplitudes(self):
        rng = np.random.default_rng(1)
        state = TwoModeState(c1=HALF, c2=HALF)
        n = 100_000
        ones = sum(detect(state, rng) == 1 for _ in range(n))
        assert abs(ones - n / 2) <= 3 * np.sqrt(0.25 * n)

    def test_same_seed_same_click(self):
        state = TwoModeState(c1=0.6, c2=0.8)
        assert [detect(state, s) for s in range(20)] == [detect(state, s) for s in range(20)]


class TestWhichWay:
    def test_stored_record(self):
        assert which_way_K(MomentumRecord.stored(Transfer.plus_dp), (0.5, 0.5)) == 1.0

    def test_erased_balanced(self):
        assert which_way_K(MomentumRecord.erased(), (0.5, 0.5)) == 0.0

    def test_erased_predictability(self):
        assert which_way_K(MomentumRecord.erased(), (0.9, 0.1)) == pytest.approx(0.8)

    def test_erased_transfer_carries_no_information(self):
        values = {
            which_way_K(MomentumRecord(kind=RecordKind.erased, transfer=t), (0.7, 0.3))
            for t in Transfer
        }
        assert len(values) == 1

    def test_click_distribution_must_sum_to_one(self):
        with pytest.raises(NormalizationError):
            which_way_K(MomentumRecord.erased(), (0.7, 0.7))

    @pytest.mark.parametrize("clicks", [(1.5, -0.5), (-0.2, 1.2)])
    def test_click_probabilities_must_lie_in_unit_range(self, clicks):
        with pytest.raises(NormalizationError):
            which_way_K(MomentumRecord.erased(), clicks)

    @pytest.mark.parametrize("convention", CONVENTIONS)
    def test_erased_transfer_leaves_scenario_table_unchanged(self, monkeypatch, convention):
        tables = []
        for transfer in Transfer:
            with monkeypatch.context() as m:
                m.setattr(
                    MomentumRecord, "erased",
                    classmethod(lambda cls, t=transfer: cls(kind=RecordKind.erased, transfer=t)),
                )
                assert MomentumRecord.erased().transfer is transfer
                tables.append(scenario_table(convention))
        assert all(table == tables[0] for table in tables)


class TestDuality:
    def test_free_crossing(self):
        assert duality_check(1.0, 0.0).satisfied

    def test_opaque_screen(self):
        assert duality_check(0.0, 1.0).satisfied

    def test_readable_wire_violates(self):
        record = duality_check(1.0, 1.0)
        assert record.total == pytest.approx(2.0)
        assert not record.satisfied

    def test_tolerance(self):
        K = 0.6
        assert duality_check(K, np.sqrt(1 - K**2) + 1e-12).satisfied

    @pytest.mark.parametrize("K, V", [(-0.1, 0.5), (0.5, 1.2)])
    def test_out_of_range(self, K, V):
        with pytest.raises(DualityRangeError):
            duality_check(K, V)

    @pytest.mark.parametrize("convention", CONVENTIONS)
    def test_scenario_table(self, convention):
        rows = {r.scenario: r for r in scenario_table(convention)}
        assert len(rows) == 4
        expected = {
            "free_crossing": (1.0, 0.0, True),
            "opaque_screen": (0.0, 1.0, True),
            "clamped_wire_interacting": (0.0, 1.0, True),
            "readable_wire_counterfactual": (1.0, 1.0, False),
        }
        for name, (K, V, ok) in expected.items():
            assert rows[name].K == pytest.approx(K, abs=1e-12)
            assert rows[name].V == V
            assert rows[name].satisfied is ok
        assert rows["readable_wire_counterfactual"].excluded
        assert rows["readable_wire_counterfactual"].total == pytest.approx(2.0)
        assert not any(r.excluded for n, r in rows.items() if n != "readable_wire_counterfactual")
