import numpy as np
import pytest

from analysis.bloch_siegert import (
    BS_COLUMNS,
    bs_phase_pi_pulse,
    bs_phase_rect,
    bs_report,
    bs_sequence_total,
    bs_table,
    exact_z_phase_excess,
    nutation_period,
    simulated_z_phase_excess,
)
from analysis.gate_design import solve_soft_pulse
from core.exceptions import BadIndexError, ZeroAmplitudeError, ZeroDetuningError

HARD_TAU = 0.700e-3
HARD_OMEGA = 2 * np.pi * 714.0


class TestHardPulseShifts:
    def test_spectator_two(self, alanine):
        report = bs_report(alanine, HARD_OMEGA, HARD_TAU, 2)
        assert report.approx_phase == pytest.approx(-0.260, abs=0.002)

    def test_spectator_three(self, alanine):
        report = bs_report(alanine, HARD_OMEGA, HARD_TAU, 3)
        assert report.approx_phase == pytest.approx(-0.0559, abs=0.002)

    def test_pair_totals(self, alanine):
        assert bs_sequence_total(HARD_OMEGA, alanine.delta12, HARD_TAU) == pytest.approx(-0.519, abs=0.002)
        assert bs_sequence_total(HARD_OMEGA, alanine.delta13, HARD_TAU) == pytest.approx(-0.112, abs=0.002)

    def test_table_layout(self, alanine):
        table = bs_table(alanine, HARD_OMEGA, HARD_TAU, pulses=2)
        assert list(table.columns) == BS_COLUMNS
        assert list(table["spectator"]) == [2, 3]
        assert table.loc[0, "approx_rad"] == pytest.approx(-0.519, abs=0.002)


class TestSoftPulseShifts:
    def test_alanine(self, alanine):
        solution = solve_soft_pulse(np.pi, alanine.j12, alanine.j23)
        q2 = bs_report(alanine, solution.omega_plus, solution.tau, 2)
        q3 = bs_report(alanine, solution.omega_plus, solution.tau, 3)
        assert q2.approx_phase == pytest.approx(-0.0762, abs=0.001)
        assert q3.approx_phase == pytest.approx(-0.0164, abs=0.001)


class TestClosedForms:
    def test_pi_pulse_matches_rect(self):
        omega1, delta = -2 * np.pi * 500.0, 2 * np.pi * 3000.0
        assert bs_phase_pi_pulse(omega1, delta) == pytest.approx(
            bs_phase_rect(omega1, delta, np.pi / abs(omega1))
        )

    def test_taylor_remainder_bound(self):
        for delta in 2 * np.pi * np.array([-20100.0, -4320.0, 1500.0]):
            for eps in np.linspace(-0.05, 0.05, 11):
                if eps == 0:
                    continue
                for tau in (1e-4, 1e-3, 1e-2):
                    approx = bs_phase_rect(eps * delta, delta, tau)
                    exact = exact_z_phase_excess(eps * delta, delta, tau)
                    assert abs(exact - approx) / abs(approx) <= eps ** 2 / 2 + 1e-6

    def test_sign_follows_detuning(self):
        for delta in (-1e4, 1e4):
            for omega1 in (-3e3, 5e2, 2e4):
                assert np.sign(exact_z_phase_excess(omega1, delta, 1e-3)) == np.sign(delta)

    def test_small_epsilon_keeps_precision(self):
        delta = 2 * np.pi * 1e4
        exact = exact_z_phase_excess(0.02 * delta, delta, 1e-3)
        approx = bs_phase_rect(0.02 * delta, delta, 1e-3)
        assert abs(exact - approx) / approx == pytest.approx(1e-4, rel=0.01)

    def test_zero_detuning(self):
        with pytest.raises(ZeroDetuningError):
            bs_phase_rect(1.0, 0.0, 1e-3)
        with pytest.raises(ZeroDetuningError):
            exact_z_phase_excess(1.0, 0.0, 1e-3)

    def test_zero_amplitude_pi_pulse(self):
        with pytest.raises(ZeroAmplitudeError):
            bs_phase_pi_pulse(0.0, 1e3)


class TestTwoLevelValidation:
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, -0.2])
    @pytest.mark.parametrize("delta_hz", [-4320.0, 20100.0])
    @pytest.mark.parametrize("periods", [1, 2])
    def test_simulated_matches_exact_at_whole_periods(self, eps, delta_hz, periods):
        delta = 2 * np.pi * delta_hz
        omega1 = eps * delta
        tau = periods * nutation_period(omega1, delta)
        assert simulated_z_phase_excess(omega1, delta, tau) == pytest.approx(
            exact_z_phase_excess(omega1, delta, tau), abs=1e-9
        )


class TestReport:
    def test_zero_amplitude_report(self, alanine):
        report = bs_report(alanine, 0.0, 1e-3, 3)
        assert report.epsilon == 0.0
        assert report.approx_phase == 0.0
        assert report.exact_phase == 0.0
        assert report.relative_error == 0.0

    def test_spectator_index(self, alanine):
        with pytest.raises(BadIndexError):
            bs_report(alanine, 1e3, 1e-3, 1)
