"""Trapezoid pulse evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mycosim import PulseSpec, SolverError


def test_knot_values():
    p = PulseSpec(amplitude=2.0, delay=1.0, rise=0.5, fall=0.25, width=3.0)
    assert p.value(0.0) == 0.0
    assert p.value(1.0) == 0.0
    assert p.value(1.25) == pytest.approx(1.0)
    assert p.value(1.5) == pytest.approx(2.0)
    assert p.value(4.0) == pytest.approx(2.0)
    assert p.value(4.625) == pytest.approx(1.0)
    assert p.value(4.75) == pytest.approx(0.0)
    assert p.value(100.0) == 0.0


def test_single_shot_when_period_zero():
    p = PulseSpec(amplitude=1.0, delay=0.0, rise=0.1, fall=0.1, width=0.5, period=0.0)
    assert p.value(10.0) == 0.0


def test_periodic_repetition():
    p = PulseSpec(amplitude=1.0, delay=0.0, rise=0.1, fall=0.1, width=0.5, period=2.0)
    t = np.array([0.3, 2.3, 4.3, 6.3])
    assert np.allclose(p.values(t), 1.0)
    assert p.value(1.9) == 0.0


def test_vectorized_matches_scalar():
    p = PulseSpec()
    t = np.linspace(0.0, 3e-4, 101)
    vec = p.values(t)
    assert vec.shape == t.shape
    for k in (0, 13, 50, 100):
        assert vec[k] == p.value(float(t[k]))


def test_negative_amplitude_allowed():
    p = PulseSpec(amplitude=-0.06)
    assert p.value(p.delay + p.rise + p.width / 2) == pytest.approx(-0.06)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"amplitude": float("nan")},
        {"delay": -1.0},
        {"rise": float("inf")},
        {"width": 0.0},
        {"period": 1e-9},
    ],
)
def test_validation(kwargs):
    with pytest.raises(SolverError):
        PulseSpec(**kwargs)


@given(
    t=st.floats(0.0, 1.0),
    shift=st.integers(1, 5),
)
@settings(max_examples=50, deadline=None)
def test_periodicity_property(t, shift):
    p = PulseSpec(amplitude=1.0, delay=0.0, rise=0.05, fall=0.05, width=0.4, period=1.0)
    assert p.value(t) == pytest.approx(p.value(t + shift), abs=1e-12)


@given(t=st.floats(-10.0, 10.0))
@settings(max_examples=50, deadline=None)
def test_bounded_by_amplitude(t):
    p = PulseSpec(amplitude=0.06, delay=0.5, rise=0.2, fall=0.3, width=1.0, period=2.5)
    assert 0.0 <= p.value(t) <= 0.06
