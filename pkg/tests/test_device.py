"""Device model tests: capacitor charging, LLG numerics, switching."""

import math

import numpy as np
import pytest

from mesram import device
from mesram.device import (
    EPS0,
    LlgParams,
    MagnetizationState,
    MefetParams,
    MefetState,
    Resistance,
)
from mesram.errors import (
    IndeterminateStateError,
    InvalidInputError,
    SwitchingFailureError,
)


def test_me_capacitance_matches_direct_evaluation():
    p = MefetParams()
    # independent evaluation of eps0 * eps_r * A / t
    expected = EPS0 * 12.0 * 900e-18 / 10e-9
    assert device.me_capacitance(p) == pytest.approx(expected, rel=1e-12)
    assert device.me_capacitance(p) == pytest.approx(9.56e-18, rel=1e-3)


def test_me_capacitance_halves_with_double_thickness():
    p = MefetParams()
    p2 = MefetParams(t_me=20e-9)
    assert device.me_capacitance(p2) == pytest.approx(
        0.5 * device.me_capacitance(p))


def test_zero_area_rejected():
    with pytest.raises(InvalidInputError):
        MefetParams(area_me=0.0)


def test_param_invariants():
    with pytest.raises(InvalidInputError):
        MefetParams(r_on=1e6, r_off=1e3)
    with pytest.raises(InvalidInputError):
        MefetParams(v_g_nominal=0.01)  # below threshold
    with pytest.raises(InvalidInputError):
        MefetParams(r_on=1e6, r_off=2e6)  # ratio too small


class TestChargeGate:
    def test_long_duration_reaches_applied_voltage(self):
        p = MefetParams()
        st = device.charge_gate(MefetState(), p, 0.1,
                                100 * device.gate_time_constant(p))
        assert st.gate_charge_v == pytest.approx(0.1, rel=1e-6)
        assert st.drive_sign == 1

    def test_below_threshold_never_enables_drive(self):
        p = MefetParams()
        st = MefetState()
        for _ in range(20):
            st = device.charge_gate(st, p, 0.03,
                                    10 * device.gate_time_constant(p))
        assert st.drive_sign == 0
        assert abs(st.gate_charge_v) < p.v_th

    def test_one_time_constant_matches_rc_oracle(self):
        p = MefetParams()
        tau = device.gate_time_constant(p)
        st = device.charge_gate(MefetState(), p, 0.1, tau)
        assert st.gate_charge_v == pytest.approx(0.1 * (1 - math.exp(-1)),
                                                 rel=1e-9)
        assert st.gate_charge_v == pytest.approx(0.0632, abs=1e-4)
        assert st.drive_sign == 1

    def test_nonfinite_voltage_rejected(self):
        with pytest.raises(InvalidInputError):
            device.charge_gate(MefetState(), MefetParams(), float("nan"), 1e-12)

    def test_negative_voltage_sets_negative_drive(self):
        p = MefetParams()
        st = device.charge_gate(MefetState(), p, -0.1,
                                10 * device.gate_time_constant(p))
        assert st.drive_sign == -1


class TestLlgStep:
    def test_easy_axis_fixed_point(self):
        lp = LlgParams()
        st = MagnetizationState(m=(0.0, 0.0, 1.0))
        new = device.llg_step(st, lp, (0.0, 0.0, 0.0))
        assert np.allclose(new.m, st.m, atol=1e-12)

    def test_norm_conserved_every_step(self):
        lp = LlgParams()
        st = MagnetizationState(m=tuple(np.array([1.0, 1.0, 1.0]) / np.sqrt(3)))
        for _ in range(200):
            st = device.llg_step(st, lp, (0.0, 0.0, 0.0))
            assert abs(np.linalg.norm(st.m) - 1.0) < 1e-9

    def test_damped_relaxation_monotone(self):
        # energy proxy -(m.e)^2 must never increase at T=0, E=0
        lp = LlgParams()
        st = MagnetizationState(m=tuple(np.array([0.6, 0.0, 0.8])))
        prev = -np.dot(st.m, (0, 0, 1)) ** 2
        for _ in range(500):
            st = device.llg_step(st, lp, (0.0, 0.0, 0.0))
            cur = -np.dot(st.m, (0, 0, 1)) ** 2
            assert cur <= prev + 1e-12
            prev = cur

    def test_zero_damping_conserves_field_angle(self):
        # pure precession about a static external field
        lp = LlgParams(alpha=1e-12, k_u=0.0, h_ext=(0.0, 0.0, 1e5))
        st = MagnetizationState(m=tuple(np.array([0.6, 0.0, 0.8])))
        angle0 = np.dot(st.m, (0, 0, 1))
        for _ in range(100):
            st = device.llg_step(st, lp, (0.0, 0.0, 0.0))
        assert abs(np.linalg.norm(st.m) - 1.0) < 1e-9
        assert np.dot(st.m, (0, 0, 1)) == pytest.approx(angle0, abs=1e-6)

    def test_invalid_dt_rejected(self):
        with pytest.raises(InvalidInputError):
            LlgParams(dt=0.0)

    def test_heun_convergence_order(self):
        # global error vs an RK4 reference at dt/10; Heun is order 2
        t_end = 4e-12
        m0 = tuple(np.array([0.6, 0.0, 0.8]))

        def run(stepper, dt):
            lp = LlgParams(alpha=0.1, dt=dt)
            st = MagnetizationState(m=m0)
            for _ in range(round(t_end / dt)):
                st = stepper(st, lp, (0.0, 0.0, 0.0))
            return np.asarray(st.m)

        dt = 4e-14
        ref = run(device.llg_step_rk4, dt / 10)
        err1 = np.linalg.norm(run(device.llg_step, dt) - ref)
        err2 = np.linalg.norm(run(device.llg_step, dt / 2) - ref)
        order = math.log2(err1 / err2)
        assert 1.8 <= order <= 2.2

    def test_heun_matches_reference_trajectory(self):
        # damped relaxation reproduced by the dt/10 RK4 reference
        t_end = 10e-12
        m0 = tuple(np.array([0.6, 0.0, 0.8]))
        lp = LlgParams(alpha=0.1)
        st = MagnetizationState(m=m0)
        for _ in range(round(t_end / lp.dt)):
            st = device.llg_step(st, lp, (0.0, 0.0, 0.0))
        lp_ref = LlgParams(alpha=0.1, dt=lp.dt / 10)
        ref = MagnetizationState(m=m0)
        for _ in range(round(t_end / lp_ref.dt)):
            ref = device.llg_step_rk4(ref, lp_ref, (0.0, 0.0, 0.0))
        assert np.allclose(st.m, ref.m, atol=1e-6)


class TestThermalField:
    def test_zero_temperature_is_zero(self):
        lp = LlgParams(temperature=0.0)
        rng = np.random.default_rng(0)
        assert np.array_equal(device.thermal_field(lp, rng), np.zeros(3))

    def test_statistics_match_analytic_std(self):
        lp = LlgParams(temperature=300.0)
        rng = np.random.default_rng(42)
        samples = device.thermal_field(lp, rng, size=100_000)
        expected = math.sqrt(2 * lp.alpha * device.KB * 300.0
                             / (lp.gamma * device.MU0 ** 2 * lp.m_s
                                * lp.volume * lp.dt))
        assert np.all(np.abs(samples.mean(axis=0)) < 0.02 * expected)
        assert np.allclose(samples.std(axis=0), expected, rtol=0.02)

    def test_quadrupled_temperature_doubles_std(self):
        lp1 = LlgParams(temperature=75.0)
        lp4 = LlgParams(temperature=300.0)
        assert device.thermal_std(lp4) == pytest.approx(
            2 * device.thermal_std(lp1))

    def test_deterministic_under_fixed_seed(self):
        lp = LlgParams(temperature=300.0)
        a = device.thermal_field(lp, np.random.default_rng(7), size=16)
        b = device.thermal_field(lp, np.random.default_rng(7), size=16)
        assert np.array_equal(a, b)


class TestWriteMefet:
    def setup_method(self):
        self.p = MefetParams()
        self.lp = LlgParams()
        self.on = MefetState(
            resistance=Resistance.ON,
            magnetization=MagnetizationState(m=(0.0, 0.0, -1.0)))

    def test_write_one_reads_off(self):
        st, _ = device.write_mefet(self.on, self.p, self.lp, 1)
        assert st.resistance is Resistance.OFF
        assert device.read_resistance(st, self.p, self.lp) == pytest.approx(63.4e6)

    def test_idempotent(self):
        st, _ = device.write_mefet(self.on, self.p, self.lp, 1)
        st2, delay2 = device.write_mefet(st, self.p, self.lp, 1)
        assert st2.resistance is st.resistance
        assert st2.magnetization.m == st.magnetization.m
        assert delay2 == pytest.approx(self.p.precession_delay)

    def test_toggle_reports_switching_plus_precession(self):
        st, delay = device.write_mefet(self.on, self.p, self.lp, 1)
        assert st.resistance is Resistance.OFF
        assert delay > self.p.precession_delay

    def test_switching_time_under_20ps(self):
        # calibration target for the default coefficient set
        t_sw = device.calibrated_switching_time(self.p, self.lp)
        assert 0 < t_sw < 20e-12

    def test_step_refinement_consistency(self):
        # halving dt moves the measured switching time by <5%
        _, d1 = device.write_mefet(self.on, self.p, self.lp, 1)
        import dataclasses
        lp2 = dataclasses.replace(self.lp, dt=self.lp.dt / 2)
        _, d2 = device.write_mefet(self.on, self.p, lp2, 1)
        t1 = d1 - self.p.precession_delay
        t2 = d2 - self.p.precession_delay
        assert abs(t1 - t2) / t2 < 0.05

    def test_behavioral_path_matches_integrated_result(self):
        st_i, d_i = device.write_mefet(self.on, self.p, self.lp, 1)
        st_b, d_b = device.write_mefet(self.on, self.p, self.lp, 1,
                                       integrate=False)
        assert st_b.resistance is st_i.resistance
        assert d_b == pytest.approx(d_i, rel=1e-9)

    def test_nonconvergence_raises(self):
        import dataclasses
        # drive far too weak to switch within the window
        lp = dataclasses.replace(self.lp, beta_me=1e-6)
        with pytest.raises(SwitchingFailureError):
            device.write_mefet(self.on, self.p, lp, 1, max_time=50e-12)

    def test_invalid_bit(self):
        with pytest.raises(InvalidInputError):
            device.write_mefet(self.on, self.p, self.lp, 2)


class TestReadResistance:
    def test_on_off_values_and_ratio(self):
        p = MefetParams()
        on = MefetState(resistance=Resistance.ON)
        off = MefetState(resistance=Resistance.OFF,
                         magnetization=MagnetizationState(m=(0.0, 0.0, 1.0)))
        assert device.read_resistance(on, p) == pytest.approx(1.05e3)
        assert device.read_resistance(off, p) == pytest.approx(63.4e6)
        ratio = device.read_resistance(off, p) / device.read_resistance(on, p)
        assert ratio == pytest.approx(6.04e4, rel=1e-3)
        assert ratio < 1e6

    def test_unsettled_read_raises(self):
        p, lp = MefetParams(), LlgParams()
        st = MefetState(magnetization=MagnetizationState(m=(1.0, 0.0, 0.0)))
        with pytest.raises(IndeterminateStateError):
            device.read_resistance(st, p, lp)

    def test_read_is_pure(self):
        p = MefetParams()
        st = MefetState()
        device.read_resistance(st, p)
        assert st == MefetState()
