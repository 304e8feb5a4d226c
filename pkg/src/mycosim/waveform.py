"""Trapezoid pulse stimulus, shared by the solver and netlist export."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError


@dataclass(frozen=True)
class PulseSpec:
    """Single or repeating trapezoid pulse, SPICE-style.

    Value is 0 before ``delay``, ramps to ``amplitude`` over ``rise``,
    holds for ``width``, ramps back over ``fall``, then stays 0 until the
    next period. ``period == 0`` means the pulse fires once.
    """

    amplitude: float = 0.06
    delay: float = 1e-6
    rise: float = 1e-7
    fall: float = 1e-7
    width: float = 5e-5
    period: float = 0.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.amplitude):
            raise SolverError("pulse amplitude must be finite")
        for name in ("delay", "rise", "fall", "width", "period"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0.0:
                raise SolverError(f"pulse {name} must be finite and >= 0")
        if self.width <= 0.0:
            raise SolverError("pulse width must be positive")
        if self.period > 0.0 and self.period < self.rise + self.width + self.fall:
            raise SolverError("pulse period shorter than one pulse")

    def value(self, t: float) -> float:
        return float(self.values(np.asarray([t]))[0])

    def values(self, times: np.ndarray) -> np.ndarray:
        """Vectorized waveform evaluation."""
        t = np.asarray(times, dtype=float)
        tau = t - self.delay
        if self.period > 0.0:
            tau = np.where(tau >= 0.0, np.mod(tau, self.period), tau)
        out = np.zeros_like(tau)
        a = self.amplitude
        r, w, f = self.rise, self.width, self.fall
        if r > 0.0:
            rising = (tau >= 0.0) & (tau < r)
            out[rising] = a * tau[rising] / r
        high = (tau >= r) & (tau < r + w)
        out[high] = a
        if f > 0.0:
            falling = (tau >= r + w) & (tau < r + w + f)
            out[falling] = a * (1.0 - (tau[falling] - r - w) / f)
        return out
