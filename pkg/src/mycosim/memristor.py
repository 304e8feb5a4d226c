"""Charge-driven memristor with a polynomial edge window.

The device is a state-dependent resistor: an internal state w in [0, 1]
mixes the fully-on and fully-off resistances, and the state drifts in
proportion to the charge that has passed, throttled near the ends of the
range by a window that vanishes at w = 0 and w = 1.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import MemristorError


@dataclass(frozen=True)
class MemristorModel:
    """Device parameters plus current state.

    mobility is the state change per coulomb of charge through the device;
    window_p sets how sharply drift is suppressed at the range ends.
    """

    # default mobility swings w across [0.1, ~0.9] over one default
    # sweep without railing against the clamp
    r_on: float = 1e3
    r_off: float = 1e4
    w: float = 0.1
    mobility: float = 2.4e4
    window_p: int = 1

    def __post_init__(self) -> None:
        if self.r_on <= 0.0 or self.r_off <= 0.0:
            raise MemristorError("r_on and r_off must be positive")
        if self.r_off < self.r_on:
            raise MemristorError("r_off must be >= r_on")
        if not 0.0 <= self.w <= 1.0:
            raise MemristorError("state w must lie in [0, 1]")
        if self.window_p < 1:
            raise MemristorError("window_p must be a positive integer")
        if not np.isfinite(self.mobility):
            raise MemristorError("mobility must be finite")

    def resistance(self) -> float:
        """Instantaneous resistance r_on*w + r_off*(1 - w)."""
        return self.r_on * self.w + self.r_off * (1.0 - self.w)

    def window(self) -> float:
        """Drift throttle 1 - (2w - 1)^(2p); zero at both range ends."""
        return 1.0 - (2.0 * self.w - 1.0) ** (2 * self.window_p)


def step_state(model: MemristorModel, volts: float, dt: float) -> MemristorModel:
    """Advance the state explicitly by one time step at a fixed bias.

    The branch current is volts / resistance(state); the state moves by
    mobility * current * window * dt and is clamped to [0, 1].
    """
    if dt <= 0.0:
        raise MemristorError("dt must be positive")
    current = volts / model.resistance()
    w_next = model.w + model.mobility * current * model.window() * dt
    w_next = min(1.0, max(0.0, w_next))
    return dataclasses.replace(model, w=w_next)


@dataclass(frozen=True)
class IVCurve:
    """Sampled voltage drive and current response of a single device."""

    time: np.ndarray
    voltage: np.ndarray
    current: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.time, dtype=float)
        if t.size < 2 or np.any(np.diff(t) <= 0.0):
            raise MemristorError("curve times must be strictly increasing")
        for name in ("time", "voltage", "current"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != t.shape:
                raise MemristorError("curve arrays must share one shape")
            if not np.all(np.isfinite(arr)):
                raise MemristorError(f"curve {name} contains non-finite values")

    def to_csv(self) -> str:
        lines = ["t,v,i"]
        for t, v, i in zip(self.time, self.voltage, self.current):
            lines.append(f"{float(t)!r},{float(v)!r},{float(i)!r}")
        return "\n".join(lines) + "\n"


def triangle_drive(v_peak: float, sweep_rate: float, cycles: int, steps_per_cycle: int):
    """Sample times and voltages of the cyclic triangular sweep.

    One cycle runs 0 -> +v_peak -> -v_peak -> 0 at a constant slew of
    sweep_rate volts per second.
    """
    if v_peak <= 0.0:
        raise MemristorError("v_peak must be positive")
    if sweep_rate <= 0.0:
        raise MemristorError("sweep_rate must be positive")
    if cycles < 1 or steps_per_cycle < 8:
        raise MemristorError("need cycles >= 1 and steps_per_cycle >= 8")
    period = 4.0 * v_peak / sweep_rate
    total = cycles * steps_per_cycle
    t = np.arange(total + 1) * (period / steps_per_cycle)
    phase = (t / period) % 1.0
    v = np.empty_like(t)
    up = phase < 0.25
    down = (phase >= 0.25) & (phase < 0.75)
    tail = phase >= 0.75
    v[up] = 4.0 * phase[up] * v_peak
    v[down] = v_peak * (1.0 - 4.0 * (phase[down] - 0.25))
    v[tail] = -v_peak * (1.0 - 4.0 * (phase[tail] - 0.75))
    return t, v


def cv_sweep(
    model: MemristorModel,
    v_peak: float = 0.5,
    sweep_rate: float = 1.0,
    cycles: int = 1,
    steps_per_cycle: int = 2000,
) -> IVCurve:
    """Cyclic voltammetry: drive the triangle wave, record I(V).

    The state advances explicitly once per sample, so halving the step
    size refines the curve; the current at each sample uses the state
    before that sample's update.
    """
    t, v = triangle_drive(v_peak, sweep_rate, cycles, steps_per_cycle)
    dt = float(t[1] - t[0])
    current = np.empty_like(v)
    state = model
    for k in range(v.size):
        current[k] = v[k] / state.resistance()
        state = step_state(state, float(v[k]), dt)
    return IVCurve(time=t, voltage=v, current=current)


@dataclass(frozen=True)
class LoopMetrics:
    pinch_current: float
    lobe_area: float


def loop_metrics(curve: IVCurve) -> LoopMetrics:
    """Pinch and lobe-area diagnostics of a hysteresis curve.

    pinch_current is the largest |I| where the drive crosses zero volts
    (linearly interpolated between samples). lobe_area sums the unsigned
    trapezoid integral of I dV over each stretch between consecutive
    zero crossings, so lobes of opposite winding cannot cancel.
    """
    v = np.asarray(curve.voltage, dtype=float)
    i = np.asarray(curve.current, dtype=float)
    pinch_samples: list[float] = []
    areas: list[float] = []
    segment = 0.0
    crossed = False
    for k in range(v.size - 1):
        v0, v1 = v[k], v[k + 1]
        i0, i1 = i[k], i[k + 1]
        if v0 == 0.0:
            pinch_samples.append(abs(i0))
            crossed = True
            areas.append(abs(segment))
            segment = 0.0
        if v0 * v1 < 0.0:
            alpha = v0 / (v0 - v1)
            i_star = i0 + alpha * (i1 - i0)
            pinch_samples.append(abs(i_star))
            crossed = True
            segment += 0.5 * (i0 + i_star) * (0.0 - v0)
            areas.append(abs(segment))
            segment = 0.5 * (i_star + i1) * (v1 - 0.0)
        else:
            segment += 0.5 * (i0 + i1) * (v1 - v0)
    if v[-1] == 0.0:
        pinch_samples.append(abs(i[-1]))
        crossed = True
    areas.append(abs(segment))
    if not crossed:
        raise MemristorError("curve never crosses zero volts")
    return LoopMetrics(pinch_current=max(pinch_samples), lobe_area=float(sum(areas)))
