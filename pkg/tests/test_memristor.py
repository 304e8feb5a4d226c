"""Memristor model, triangle sweeps, and hysteresis-loop metrics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mycosim.errors import MemristorError
from mycosim.memristor import (
    IVCurve,
    MemristorModel,
    cv_sweep,
    loop_metrics,
    step_state,
    triangle_drive,
)


class TestModel:
    def test_default_resistance_interpolates_states(self):
        model = MemristorModel()
        # 0.1 * 1e3 + 0.9 * 1e4
        assert model.resistance() == pytest.approx(9100.0)

    def test_resistance_endpoints(self):
        assert MemristorModel(w=0.0).resistance() == pytest.approx(1e4)
        assert MemristorModel(w=1.0).resistance() == pytest.approx(1e3)

    def test_window_value_and_boundary_zeros(self):
        assert MemristorModel(w=0.1).window() == pytest.approx(0.36)
        assert MemristorModel(w=0.0).window() == 0.0
        assert MemristorModel(w=1.0).window() == 0.0
        assert MemristorModel(w=0.5).window() == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"r_on": 0.0},
            {"r_on": -10.0},
            {"r_on": 2e4},  # exceeds r_off
            {"w": -0.01},
            {"w": 1.01},
            {"window_p": 0.5},
            {"mobility": float("nan")},
            {"mobility": float("inf")},
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(MemristorError):
            MemristorModel(**kwargs)


class TestStepState:
    def test_positive_drive_moves_toward_low_resistance(self):
        model = MemristorModel()
        after = step_state(model, 0.5, 1e-4)
        assert after.w > model.w
        assert after.resistance() < model.resistance()

    def test_zero_drive_is_identity(self):
        model = MemristorModel()
        assert step_state(model, 0.0, 1.0).w == model.w

    def test_boundaries_are_fixed_points(self):
        # The polynomial window vanishes at both rails, so a state
        # parked exactly on one cannot move again.
        for w in (0.0, 1.0):
            model = MemristorModel(w=w)
            assert step_state(model, 0.5, 10.0).w == w
            assert step_state(model, -0.5, 10.0).w == w

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(MemristorError):
            step_state(MemristorModel(), 0.1, 0.0)
        with pytest.raises(MemristorError):
            step_state(MemristorModel(), 0.1, -1e-3)

    @given(
        start=st.floats(min_value=0.01, max_value=0.99),
        drives=st.lists(
            st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
            min_size=1,
            max_size=60,
        ),
    )
    @settings(max_examples=40, deadline=None)
    def test_state_stays_in_unit_interval(self, start, drives):
        state = MemristorModel(w=start)
        for v in drives:
            state = step_state(state, v, 1e-2)
            assert 0.0 <= state.w <= 1.0


class TestTriangleDrive:
    def test_single_cycle_knots(self):
        t, v = triangle_drive(1.0, 1.0, cycles=1, steps_per_cycle=8)
        # period 4 * v_peak / rate = 4 s, sampled every 0.5 s
        assert t.shape == v.shape == (9,)
        np.testing.assert_allclose(t, 0.5 * np.arange(9))
        np.testing.assert_allclose(
            v, [0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -1.0, -0.5, 0.0]
        )

    def test_cycles_repeat_exactly(self):
        t, v = triangle_drive(0.5, 2.0, cycles=3, steps_per_cycle=40)
        assert v.size == 3 * 40 + 1
        np.testing.assert_allclose(v[:40], v[40:80], atol=1e-14)
        np.testing.assert_allclose(v[:40], v[80:120], atol=1e-14)

    def test_peaks_hit_exactly(self):
        _, v = triangle_drive(0.5, 1.0, cycles=1, steps_per_cycle=2000)
        assert v.max() == pytest.approx(0.5)
        assert v.min() == pytest.approx(-0.5)

    @pytest.mark.parametrize(
        "args",
        [
            (0.0, 1.0, 1, 8),
            (-1.0, 1.0, 1, 8),
            (1.0, 0.0, 1, 8),
            (1.0, 1.0, 0, 8),
            (1.0, 1.0, 1, 7),
        ],
    )
    def test_rejects_bad_arguments(self, args):
        with pytest.raises(MemristorError):
            triangle_drive(*args)


class TestIVCurve:
    def test_rejects_malformed_data(self):
        t = np.array([0.0, 1.0, 2.0])
        ok = np.zeros(3)
        with pytest.raises(MemristorError):
            IVCurve(time=np.array([0.0, 1.0, 1.0]), voltage=ok, current=ok)
        with pytest.raises(MemristorError):
            IVCurve(time=t, voltage=np.zeros(2), current=ok)
        with pytest.raises(MemristorError):
            IVCurve(time=t, voltage=ok, current=np.array([0.0, np.nan, 0.0]))
        with pytest.raises(MemristorError):
            IVCurve(time=np.array([0.0]), voltage=np.zeros(1), current=np.zeros(1))

    def test_to_csv_layout(self):
        curve = IVCurve(
            time=np.array([0.0, 1.0]),
            voltage=np.array([0.0, 0.5]),
            current=np.array([0.0, 0.25]),
        )
        assert curve.to_csv() == "t,v,i\n0.0,0.0,0.0\n1.0,0.5,0.25\n"


class TestLoopMetrics:
    def test_figure_eight_area(self):
        # V = sin t, I = sin t cos t traces a figure-eight whose lobes
        # satisfy I^2 = V^2 (1 - V^2). Each lobe encloses
        # 2 * int_0^1 v sqrt(1 - v^2) dv = 2/3, and the unsigned
        # per-lobe sum keeps both, so the expected total is 4/3.
        t = np.linspace(0.0, 2.0 * np.pi, 20001)
        curve = IVCurve(time=t, voltage=np.sin(t), current=np.sin(t) * np.cos(t))
        m = loop_metrics(curve)
        assert m.lobe_area == pytest.approx(4.0 / 3.0, rel=1e-6)
        # current vanishes wherever the drive does
        assert m.pinch_current < 1e-12

    def test_ellipse_area_and_crossing_current(self):
        # V = sin t, I = cos t: one loop of area pi, crossing the
        # voltage axis at |I| = 1.
        t = np.linspace(0.0, 2.0 * np.pi, 20001)
        curve = IVCurve(time=t, voltage=np.sin(t), current=np.cos(t))
        m = loop_metrics(curve)
        assert m.lobe_area == pytest.approx(math.pi, rel=1e-6)
        assert m.pinch_current == pytest.approx(1.0, rel=1e-6)

    def test_requires_a_zero_crossing(self):
        t = np.linspace(0.0, 2.0 * np.pi, 101)
        v = 1.0 + 0.5 * np.sin(t)
        with pytest.raises(MemristorError):
            loop_metrics(IVCurve(time=t, voltage=v, current=np.cos(t)))


class TestCvSweep:
    def test_is_deterministic(self):
        a = cv_sweep(MemristorModel())
        b = cv_sweep(MemristorModel())
        np.testing.assert_array_equal(a.current, b.current)
        np.testing.assert_array_equal(a.voltage, b.voltage)

    def test_default_sweep_pinches_and_opens(self):
        curve = cv_sweep(MemristorModel())
        m = loop_metrics(curve)
        i_max = float(np.max(np.abs(curve.current)))
        assert m.pinch_current <= 0.01 * i_max
        assert m.lobe_area > 0.0

    def test_degenerate_device_retraces_its_path(self):
        curve = cv_sweep(MemristorModel(r_on=5e3, r_off=5e3))
        m = loop_metrics(curve)
        i_max = float(np.max(np.abs(curve.current)))
        v_max = float(np.max(np.abs(curve.voltage)))
        assert m.lobe_area < 1e-12 * i_max * v_max

    def test_amplitude_stable_under_refinement(self):
        coarse = cv_sweep(MemristorModel(), steps_per_cycle=2000)
        fine = cv_sweep(MemristorModel(), steps_per_cycle=20000)
        a = float(np.max(np.abs(coarse.current)))
        b = float(np.max(np.abs(fine.current)))
        assert abs(a - b) / b < 0.02

    def test_state_actually_moves(self):
        curve = cv_sweep(MemristorModel())
        # rising and falling branches pass the same voltage with
        # different conductance, so the currents must split
        quarter = (curve.voltage.size - 1) // 4
        rising = quarter // 2
        falling = quarter + quarter // 2
        assert curve.voltage[rising] == pytest.approx(curve.voltage[falling])
        assert curve.current[rising] != pytest.approx(
            curve.current[falling], rel=1e-3
        )
