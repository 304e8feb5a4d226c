"""Spike and baseline analysis for slow electrical recordings.

Works on uniformly sampled traces of fungal electrical activity, in
millivolts (potential) or kiloohms (resistance). The pipeline:

1. a running median estimates the slow baseline,
2. the residual is box-smoothed over half the minimum spike width,
3. threshold excursions of the smoothed residual become spikes, with
   amplitude refined by a local quadratic fit of the raw residual and
   width read as full width at half amplitude,
4. spikes group into trains by peak-to-peak gap, and trains classify by
   nearest centroid against two reference activity modes,
5. sustained baseline shifts are characterized by an exponential-
   approach model whose time constant comes from the area between the
   trace and its plateau (far less noise-sensitive than a direct
   threshold crossing).

A synthesizer builds seeded ground-truth recordings from bell, step and
train primitives for calibration and testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.ndimage import median_filter, uniform_filter1d

from .errors import RecordingError


class Unit(str, Enum):
    MILLIVOLTS = "millivolts"
    KILOOHMS = "kiloohms"


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class TrainClass(str, Enum):
    LOW_FREQ_HIGH_AMP = "LowFreqHighAmp"
    HIGH_FREQ_LOW_AMP = "HighFreqLowAmp"


#: Reference activity modes in (width s, amplitude kiloohm, interval s):
#: slow/large oscillations vs fast/small ones.
CENTROID_LOW_FREQ = (28.0 * 60.0, 1.6, 57.0 * 60.0)
CENTROID_HIGH_FREQ = (10.0 * 60.0, 0.6, 44.0 * 60.0)


@dataclass(frozen=True)
class Recording:
    """Uniformly sampled time series."""

    sample_interval: float
    samples: np.ndarray
    unit: Unit = Unit.MILLIVOLTS

    def __post_init__(self) -> None:
        si = self.sample_interval
        if not (isinstance(si, (int, float)) and math.isfinite(si) and si > 0):
            raise RecordingError(f"sample_interval must be positive, got {si!r}")
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise RecordingError("samples must be a 1-D array with >= 2 entries")
        if not np.all(np.isfinite(samples)):
            raise RecordingError("samples must all be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if not isinstance(self.unit, Unit):
            raise RecordingError(f"unknown unit {self.unit!r}")

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) * self.sample_interval

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.sample_interval

    def to_csv(self) -> str:
        lines = ["t,value"]
        for i, v in enumerate(self.samples):
            lines.append(f"{repr(i * self.sample_interval)},{repr(float(v))}")
        return "\n".join(lines) + "\n"


def load_recording(text: str, unit: Unit = Unit.MILLIVOLTS) -> Recording:
    """Parse `t,value` CSV; the time column must be uniformly spaced."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "t,value":
        raise RecordingError("recording CSV must start with header 't,value'")
    times = []
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise RecordingError(f"line {lineno}: expected two columns")
        try:
            times.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError as exc:
            raise RecordingError(f"line {lineno}: {exc}") from exc
    if len(times) < 2:
        raise RecordingError("recording needs at least 2 samples")
    t = np.asarray(times)
    dt = np.diff(t)
    si = float(dt[0])
    if si <= 0 or np.any(np.abs(dt - si) > 1e-6 * max(abs(si), 1e-30)):
        raise RecordingError("time column must be uniformly spaced")
    return Recording(sample_interval=si, samples=np.asarray(values), unit=unit)


@dataclass(frozen=True)
class Spike:
    """One detected excursion, indices into the source recording.

    ``amplitude`` is signed (peak minus local baseline) and ``width`` is
    the full width at half amplitude in seconds. ``peak_time`` and
    ``unit`` are carried so trains can be formed and classified without
    the recording at hand.
    """

    onset_index: int
    peak_index: int
    end_index: int
    amplitude: float
    width: float
    polarity: Polarity
    peak_time: float
    unit: Unit

    def __post_init__(self) -> None:
        if not self.onset_index < self.peak_index < self.end_index:
            raise RecordingError(
                f"spike indices must satisfy onset < peak < end, got "
                f"({self.onset_index}, {self.peak_index}, {self.end_index})"
            )
        if not (math.isfinite(self.width) and self.width > 0):
            raise RecordingError(f"spike width must be positive, got {self.width!r}")
        if not math.isfinite(self.amplitude) or self.amplitude == 0.0:
            raise RecordingError("spike amplitude must be finite and nonzero")
        expected = Polarity.POSITIVE if self.amplitude > 0 else Polarity.NEGATIVE
        if self.polarity is not expected:
            raise RecordingError("polarity must match the amplitude sign")


@dataclass(frozen=True)
class Train:
    """>= 2 consecutive spikes whose peak gaps stay within max_gap."""

    spikes: tuple[Spike, ...]
    max_gap: float

    def __post_init__(self) -> None:
        if len(self.spikes) < 2:
            raise RecordingError("a train needs at least 2 spikes")
        gaps = np.diff([s.peak_time for s in self.spikes])
        if np.any(gaps <= 0):
            raise RecordingError("train spikes must be strictly time ordered")
        if np.any(gaps > self.max_gap):
            raise RecordingError("train gaps must not exceed max_gap")

    @property
    def mean_width(self) -> float:
        return float(np.mean([s.width for s in self.spikes]))

    @property
    def mean_amplitude(self) -> float:
        return float(np.mean([abs(s.amplitude) for s in self.spikes]))

    @property
    def mean_inter_spike_interval(self) -> float:
        return float(np.mean(np.diff([s.peak_time for s in self.spikes])))


@dataclass(frozen=True)
class SpikeStats:
    """Summary statistics; all None when no spikes were detected."""

    count: int
    median_amplitude: float | None
    mean_amplitude: float | None
    median_duration: float | None
    mean_duration: float | None
    median_interval: float | None
    mean_interval: float | None


def spike_stats(spikes: Sequence[Spike]) -> SpikeStats:
    """Amplitude magnitudes, FWHM durations, peak-to-peak intervals."""
    if not spikes:
        return SpikeStats(0, None, None, None, None, None, None)
    amps = np.array([abs(s.amplitude) for s in spikes])
    widths = np.array([s.width for s in spikes])
    stats = {
        "median_amplitude": float(np.median(amps)),
        "mean_amplitude": float(np.mean(amps)),
        "median_duration": float(np.median(widths)),
        "mean_duration": float(np.mean(widths)),
    }
    if len(spikes) >= 2:
        intervals = np.diff([s.peak_time for s in spikes])
        stats["median_interval"] = float(np.median(intervals))
        stats["mean_interval"] = float(np.mean(intervals))
    else:
        stats["median_interval"] = None
        stats["mean_interval"] = None
    return SpikeStats(count=len(spikes), **stats)


def _odd_window(seconds: float, sample_interval: float) -> int:
    w = max(1, int(round(seconds / sample_interval)))
    return w if w % 2 == 1 else w + 1


def detect_spikes(
    rec: Recording,
    baseline_window: float,
    threshold: float,
    min_width: float,
) -> list[Spike]:
    """Find threshold excursions of the baseline-subtracted trace.

    The baseline is a running median over ``baseline_window`` seconds.
    An excursion qualifies as a spike when the smoothed residual stays
    beyond ``threshold`` for at least ``min_width`` seconds with its
    extremum strictly inside the excursion. Same-polarity excursions
    separated by less than half the minimum width merge into one.
    """
    si = rec.sample_interval
    if threshold <= 0 or not math.isfinite(threshold):
        raise RecordingError(f"threshold must be positive, got {threshold!r}")
    if min_width <= 0 or not math.isfinite(min_width):
        raise RecordingError(f"min_width must be positive, got {min_width!r}")
    if baseline_window < 10 * si:
        raise RecordingError("baseline_window must span at least 10 samples")
    if baseline_window > rec.duration:
        raise RecordingError("baseline_window is longer than the recording")

    baseline = median_filter(rec.samples, size=_odd_window(baseline_window, si),
                             mode="nearest")
    residual = rec.samples - baseline
    smooth_n = _odd_window(min_width / 2.0, si)
    smoothed = uniform_filter1d(residual, size=smooth_n, mode="nearest")

    runs = _threshold_runs(smoothed, threshold)
    merge_gap = int(round((min_width / 2.0) / si))
    runs = _merge_runs(runs, smoothed, merge_gap)

    min_samples = int(round(min_width / si))
    quiet = _quiet_mask(smoothed.size, runs)
    spikes: list[Spike] = []
    for start, stop in runs:
        if stop - start < min_samples:
            continue
        segment = np.abs(smoothed[start:stop])
        peak = start + int(np.argmax(segment))
        if peak <= start or peak >= stop - 1:
            continue  # edge extremum: a drift shoulder, not a spike
        sign = 1.0 if smoothed[peak] > 0 else -1.0
        # re-reference against quiet flanking samples: the running median
        # can sit slightly high where excursions crowd its window, and
        # that residue is common to the peak and its surroundings
        local = _flank_level(residual, quiet, start, stop, 2 * smooth_n)
        amplitude = _refine_amplitude(residual, smoothed, peak, min_width, si) - local
        if abs(amplitude) < threshold:
            continue
        width = _half_amplitude_width(smoothed - local, peak, amplitude, si)
        if width is None:
            continue
        spikes.append(
            Spike(
                onset_index=int(start),
                peak_index=int(peak),
                end_index=int(stop - 1),
                amplitude=float(amplitude),
                width=float(width),
                polarity=Polarity.POSITIVE if sign > 0 else Polarity.NEGATIVE,
                peak_time=float(peak * si),
                unit=rec.unit,
            )
        )
    return spikes


def _threshold_runs(smoothed: np.ndarray, threshold: float) -> list[tuple[int, int]]:
    mask = np.abs(smoothed) >= threshold
    if not mask.any():
        return []
    padded = np.diff(np.concatenate(([False], mask, [False])).astype(np.int8))
    starts = np.flatnonzero(padded == 1)
    stops = np.flatnonzero(padded == -1)
    return list(zip(starts.tolist(), stops.tolist()))


def _quiet_mask(n: int, runs: list[tuple[int, int]]) -> np.ndarray:
    """Samples safely away from every excursion.

    Each run is blocked together with a guard of one run length on both
    sides, which clears the sub-threshold tails of the excursion itself.
    """
    quiet = np.ones(n, dtype=bool)
    for start, stop in runs:
        guard = stop - start
        quiet[max(0, start - guard): min(n, stop + guard)] = False
    return quiet


def _flank_level(
    residual: np.ndarray,
    quiet: np.ndarray,
    start: int,
    stop: int,
    flank: int,
) -> float:
    """Median of the nearest quiet samples on both sides of a run."""
    quiet_idx = np.flatnonzero(quiet)
    if quiet_idx.size == 0:
        return 0.0
    left_end = np.searchsorted(quiet_idx, start)
    right_begin = np.searchsorted(quiet_idx, stop)
    picks = np.concatenate(
        [quiet_idx[max(0, left_end - flank): left_end],
         quiet_idx[right_begin: right_begin + flank]]
    )
    if picks.size == 0:
        return 0.0
    return float(np.median(residual[picks]))


def _merge_runs(
    runs: list[tuple[int, int]], smoothed: np.ndarray, merge_gap: int
) -> list[tuple[int, int]]:
    if not runs:
        return runs

    def run_sign(run: tuple[int, int]) -> float:
        seg = smoothed[run[0]: run[1]]
        return 1.0 if seg[np.argmax(np.abs(seg))] > 0 else -1.0

    merged = [runs[0]]
    for run in runs[1:]:
        prev = merged[-1]
        if run[0] - prev[1] < merge_gap and run_sign(run) == run_sign(prev):
            merged[-1] = (prev[0], run[1])
        else:
            merged.append(run)
    return merged


def _refine_amplitude(
    residual: np.ndarray,
    smoothed: np.ndarray,
    peak: int,
    min_width: float,
    si: float,
) -> float:
    """Vertex of a quadratic fit of the raw residual around the peak.

    The fit window spans half the minimum width to each side, narrow
    enough for a parabola to track any smooth extremum. This removes
    the attenuation the box smoothing puts on the smoothed peak.
    """
    half = max(2, int(round((min_width / 2.0) / si)))
    lo = max(0, peak - half)
    hi = min(residual.size, peak + half + 1)
    t = np.arange(lo, hi, dtype=float) - peak
    coeffs = np.polyfit(t, residual[lo:hi], 2)
    a, b, c = coeffs
    fallback = float(smoothed[peak])
    if a == 0.0 or a * fallback > 0:
        return fallback  # fit did not curve toward the excursion
    vertex = -b / (2 * a)
    if abs(vertex) > half:
        return fallback
    return float(np.polyval(coeffs, vertex))


def _half_amplitude_width(
    smoothed: np.ndarray, peak: int, amplitude: float, si: float
) -> float | None:
    """FWHM with interpolated half-level crossings on the smoothed trace."""
    half_level = amplitude / 2.0
    sign = 1.0 if amplitude > 0 else -1.0
    curve = sign * smoothed
    level = sign * half_level

    def crossing(direction: int) -> float | None:
        i = peak
        while 0 <= i + direction < curve.size:
            j = i + direction
            if curve[j] < level <= curve[i]:
                frac = (curve[i] - level) / (curve[i] - curve[j])
                return i + direction * frac
            i = j
        return None

    left = crossing(-1)
    right = crossing(+1)
    if left is None and right is None:
        return None
    if left is None:
        left = peak - (right - peak)
    if right is None:
        right = peak + (peak - left)
    width = (right - left) * si
    return width if width > 0 else None


def group_trains(spikes: Sequence[Spike], max_gap: float) -> list[Train]:
    """Greedy left-to-right grouping by peak-to-peak gap; no singletons."""
    if max_gap <= 0:
        raise RecordingError(f"max_gap must be positive, got {max_gap!r}")
    times = [s.peak_time for s in spikes]
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise RecordingError("spikes must be strictly time ordered")
    trains: list[Train] = []
    group: list[Spike] = []
    for spike in spikes:
        if group and spike.peak_time - group[-1].peak_time > max_gap:
            if len(group) >= 2:
                trains.append(Train(spikes=tuple(group), max_gap=max_gap))
            group = []
        group.append(spike)
    if len(group) >= 2:
        trains.append(Train(spikes=tuple(group), max_gap=max_gap))
    return trains


def classify_train(train: Train) -> TrainClass:
    """Nearest centroid in (width, amplitude, interval) space.

    Axes are normalized by the midpoint of the two reference centroids,
    so the result is unchanged under a consistent unit rescale of any
    axis. Exact ties go to the low-frequency class. Kiloohm recordings
    only: the reference amplitudes are resistances.
    """
    if any(s.unit is not Unit.KILOOHMS for s in train.spikes):
        raise RecordingError("train classification expects kiloohm recordings")
    point = np.array(
        [train.mean_width, train.mean_amplitude, train.mean_inter_spike_interval]
    )
    low = np.array(CENTROID_LOW_FREQ)
    high = np.array(CENTROID_HIGH_FREQ)
    scale = (low + high) / 2.0
    d_low = np.linalg.norm(point / scale - low / scale)
    d_high = np.linalg.norm(point / scale - high / scale)
    return TrainClass.LOW_FREQ_HIGH_AMP if d_low <= d_high else TrainClass.HIGH_FREQ_LOW_AMP


def compare_stimulus_responses(
    group_on: Sequence[Spike], group_off: Sequence[Spike]
) -> dict:
    """Median amplitude and duration ratios of two spike populations."""
    if not group_on or not group_off:
        raise RecordingError("both spike groups must be non-empty")
    amp_on = float(np.median([abs(s.amplitude) for s in group_on]))
    amp_off = float(np.median([abs(s.amplitude) for s in group_off]))
    dur_on = float(np.median([s.width for s in group_on]))
    dur_off = float(np.median([s.width for s in group_off]))
    amplitude_ratio = amp_on / amp_off
    duration_ratio = dur_on / dur_off
    return {
        "amplitude_ratio": amplitude_ratio,
        "duration_ratio": duration_ratio,
        "on_is_larger": bool(amplitude_ratio > 1 and duration_ratio > 1),
    }


@dataclass(frozen=True)
class BaselineShift:
    """One sustained level change.

    ``saturation_time`` is the onset-to-settle duration under an
    exponential-approach model; ``relaxation_time`` is its mirror after
    release, nan when the level never comes back inside the recording.
    """

    start: float
    shift_amplitude: float
    saturation_time: float
    relaxation_time: float


def detect_baseline_shift(
    rec: Recording,
    min_shift: float,
    settle_fraction: float = 0.95,
    *,
    smooth_window: float | None = None,
    min_hold: float | None = None,
) -> list[BaselineShift]:
    """Find sustained level changes of at least ``min_shift``.

    The trace is median-smoothed (rejecting superimposed spikes while
    leaving monotone rises untouched), then scanned for departures from
    the running level that hold for ``min_hold`` seconds. Transients
    that fall back sooner are skipped. The settle time comes from the
    area between trace and plateau: for an exponential approach that
    area equals amplitude times the time constant, so the estimate
    averages noise over the whole rise instead of trusting one
    threshold crossing.
    """
    si = rec.sample_interval
    if min_shift <= 0 or not math.isfinite(min_shift):
        raise RecordingError(f"min_shift must be positive, got {min_shift!r}")
    if not 0.5 <= settle_fraction < 1.0:
        raise RecordingError("settle_fraction must lie in [0.5, 1)")
    if smooth_window is None:
        smooth_window = max(25 * si, rec.duration / 50.0)
    if min_hold is None:
        min_hold = 10.0 * smooth_window
    w = _odd_window(smooth_window, si)
    if w >= rec.samples.size:
        raise RecordingError("smoothing window is longer than the recording")
    smoothed = median_filter(rec.samples, size=w, mode="nearest")
    n = smoothed.size
    hold_samples = max(1, int(round(min_hold / si)))
    settle_factor = -math.log(1.0 - settle_fraction)

    events: list[BaselineShift] = []
    base = float(np.median(smoothed[:w]))
    i = 0
    while i < n:
        departed = np.flatnonzero(np.abs(smoothed[i:] - base) >= min_shift)
        if departed.size == 0:
            break
        onset_cross = i + int(departed[0])
        returned = np.flatnonzero(
            np.abs(smoothed[onset_cross:] - base) < min_shift / 2.0
        )
        release = onset_cross + int(returned[0]) if returned.size else n
        if release - onset_cross < hold_samples:
            i = release + 1  # transient excursion, not a shift
            continue
        provisional = float(np.median(smoothed[onset_cross:release]))
        if release < n:
            # back up from the return crossing to where the level last
            # hugged the plateau, so the rise integral excludes the
            # release ramp entirely
            rel_onset = _walk_back(
                smoothed, release, provisional, 0.05 * abs(provisional - base)
            )
            rise_end = max(rel_onset, onset_cross + 1)
        else:
            rise_end = n
        mid = onset_cross + (rise_end - onset_cross) // 2
        plateau = float(np.median(smoothed[mid:rise_end])) if mid < rise_end else provisional
        amp = plateau - base
        onset = _walk_back(smoothed, onset_cross, base, 0.05 * abs(amp))
        # Integrate the remaining approach starting at the half-amplitude
        # crossing: far enough from the onset corner that the smoother is
        # faithful there, and normalizing by (plateau - trace at start)
        # cancels any error in the pre-event base estimate.
        half = np.flatnonzero(np.abs(smoothed[i:rise_end] - base) >= 0.5 * abs(amp))
        h0 = i + int(half[0]) if half.size else onset_cross
        sat_tau = _area_time_constant(plateau - smoothed[h0:rise_end], si)
        # The raw refit starts earlier, at the 20% crossing: the steep
        # first stretch carries most of the rate information, and 20%
        # still clears the corner region the smoother distorts.
        early = np.flatnonzero(np.abs(smoothed[i:rise_end] - base) >= 0.2 * abs(amp))
        q0 = i + int(early[0]) if early.size else h0
        sat_tau = _refine_tau(rec.samples[q0:rise_end], si, sat_tau)
        saturation = settle_factor * sat_tau
        if release < n:
            tail_stop = min(release + hold_samples, n)
            tail_mid = release + (tail_stop - release) // 2
            after = float(np.median(smoothed[tail_mid:tail_stop]))
            drop = plateau - after
            fall = np.flatnonzero(
                np.abs(smoothed[rise_end:tail_stop] - after) <= 0.5 * abs(drop)
            )
            if drop != 0.0 and fall.size:
                k0 = rise_end + int(fall[0])
                rel_tau = _area_time_constant(smoothed[k0:tail_stop] - after, si)
                eased = np.flatnonzero(
                    np.abs(smoothed[rise_end:tail_stop] - after) <= 0.8 * abs(drop)
                )
                q0r = rise_end + int(eased[0]) if eased.size else k0
                rel_tau = _refine_tau(rec.samples[q0r:tail_stop], si, rel_tau)
                relaxation = settle_factor * rel_tau
            else:
                relaxation = math.nan
            base = after
            i = tail_stop
        else:
            relaxation = math.nan
            i = n
        events.append(
            BaselineShift(
                start=float(onset * si),
                shift_amplitude=float(amp),
                saturation_time=float(saturation),
                relaxation_time=float(relaxation),
            )
        )
    return events


def _walk_back(smoothed: np.ndarray, index: int, level: float, tol: float) -> int:
    """Last index at or before ``index`` still within tol of level."""
    i = index
    while i > 0 and abs(smoothed[i] - level) > tol:
        i -= 1
    return i


def _area_time_constant(remaining: np.ndarray, si: float) -> float:
    """Time constant from the area under an exponential remainder.

    For an exponential approach, the area between the trace and its
    destination over any window equals the time constant times the
    change across that window. Integration stops once the remainder
    decays to a tenth of its starting value so that long flat tails
    contribute no noise, and the signed sum lets what noise remains
    cancel instead of rectifying into a bias.
    """
    if remaining.size < 2:
        return math.nan
    r0 = float(remaining[0])
    if r0 == 0.0:
        return math.nan
    crossed = np.flatnonzero(np.abs(remaining) <= 0.1 * abs(r0))
    stop = int(crossed[0]) if crossed.size else remaining.size - 1
    if stop == 0:
        return math.nan
    denom = r0 - float(remaining[stop])
    if denom == 0.0:
        return math.nan
    return float(np.sum(remaining[: stop + 1])) * si / denom


def _profile_tau(t: np.ndarray, y: np.ndarray, taus: np.ndarray) -> tuple[float, np.ndarray]:
    """Best tau for ``level + coeff * exp(-t / tau)`` by scanning taus.

    Tau is the only nonlinear parameter, so each candidate reduces to a
    2x2 linear solve; returns the residual-minimizing tau and its model.
    """
    n = y.size
    sy = float(np.sum(y))
    syy = float(np.dot(y, y))
    best_rss = math.inf
    best_tau = float(taus[0])
    best_model = np.full(n, sy / n)
    for tau in taus:
        b = np.exp(-t / tau)
        s1 = float(np.sum(b))
        s2 = float(np.dot(b, b))
        det = n * s2 - s1 * s1
        if det <= 1e-12 * n * s2:
            continue  # basis degenerate: exp column indistinguishable from constant
        sby = float(np.dot(b, y))
        c1 = (n * sby - s1 * sy) / det
        c0 = (sy - c1 * s1) / n
        rss = syy - c0 * sy - c1 * sby
        if rss < best_rss:
            best_rss = rss
            best_tau = float(tau)
            best_model = c0 + c1 * b
    return best_tau, best_model


def _refine_tau(segment: np.ndarray, si: float, tau_init: float) -> float:
    """Sharpen an area-based time constant on the raw samples.

    The smoothed trace that located the shift carries correlated noise,
    which caps how well an integral can pin the time constant. Fitting
    ``level + coeff * exp(-t / tau)`` to the raw segment recovers the
    lost precision; one trim pass drops gross outliers first so spikes
    riding on the shift cannot steer the fit.
    """
    if not math.isfinite(tau_init) or tau_init <= 0 or segment.size < 8:
        return tau_init
    t = np.arange(segment.size, dtype=np.float64) * si
    coarse = tau_init * np.exp(np.linspace(math.log(0.4), math.log(2.5), 33))
    tau, model = _profile_tau(t, segment, coarse)
    resid = segment - model
    center = float(np.median(resid))
    mad = float(np.median(np.abs(resid - center)))
    if mad > 0:
        keep = np.abs(resid - center) <= 5.0 * 1.4826 * mad
        if keep.sum() >= 8 and keep.sum() < segment.size:
            tau, _ = _profile_tau(t[keep], segment[keep], coarse)
            t, segment = t[keep], segment[keep]
    fine = tau * np.exp(np.linspace(math.log(0.85), math.log(1.18), 25))
    tau, _ = _profile_tau(t, segment, fine)
    lo, hi = float(coarse[0]), float(coarse[-1])
    if not lo * 1.05 < tau < hi * 0.95:
        return tau_init  # fit ran to the scan edge: distrust it
    return tau


@dataclass(frozen=True)
class BellEvent:
    """Gaussian bump centered at ``time`` with the given FWHM."""

    time: float
    amplitude: float
    fwhm: float

    def render(self, t: np.ndarray) -> np.ndarray:
        sigma = self.fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        return self.amplitude * np.exp(-0.5 * ((t - self.time) / sigma) ** 2)

    def span(self) -> tuple[float, float]:
        return (self.time, self.time)


@dataclass(frozen=True)
class StepEvent:
    """Exponential approach to a new level, optionally released."""

    time: float
    amplitude: float
    tau: float
    release_time: float | None = None

    def render(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        rising = t >= self.time
        out[rising] = self.amplitude * (1.0 - np.exp(-(t[rising] - self.time) / self.tau))
        if self.release_time is not None:
            at_release = self.amplitude * (
                1.0 - math.exp(-(self.release_time - self.time) / self.tau)
            )
            falling = t >= self.release_time
            out[falling] = at_release * np.exp(-(t[falling] - self.release_time) / self.tau)
        return out

    def span(self) -> tuple[float, float]:
        end = math.inf if self.release_time is None else self.release_time
        return (self.time, end)


@dataclass(frozen=True)
class TrainEvent:
    """Evenly spaced bells: ``count`` peaks starting at ``start``."""

    start: float
    count: int
    period: float
    amplitude: float
    fwhm: float

    def render(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        for k in range(self.count):
            out += BellEvent(self.start + k * self.period, self.amplitude,
                             self.fwhm).render(t)
        return out

    def span(self) -> tuple[float, float]:
        return (self.start, self.start + (self.count - 1) * self.period)


Event = BellEvent | StepEvent | TrainEvent


def synthesize_recording(
    events: Sequence[Event],
    *,
    duration: float,
    sample_interval: float,
    noise_sd: float = 0.0,
    seed: int = 0,
    unit: Unit = Unit.MILLIVOLTS,
) -> Recording:
    """Sum of primitive events plus Gaussian noise, deterministic per seed.

    Step events must not overlap each other (two contradictory sustained
    levels at once have no defined sum here); bells may overlap anything.
    """
    if duration <= 0 or sample_interval <= 0:
        raise RecordingError("duration and sample_interval must be positive")
    if noise_sd < 0 or not math.isfinite(noise_sd):
        raise RecordingError(f"noise_sd must be >= 0, got {noise_sd!r}")
    for ev in events:
        lo, hi = ev.span()
        if lo < 0 or (math.isfinite(hi) and hi > duration):
            raise RecordingError(f"event {ev!r} falls outside the recording")
    steps = sorted(
        (ev for ev in events if isinstance(ev, StepEvent)), key=lambda s: s.time
    )
    for first, second in zip(steps, steps[1:]):
        end = first.release_time if first.release_time is not None else math.inf
        if second.time < end:
            raise RecordingError(
                "step events overlap: "
                f"one starting at {first.time} is still active at {second.time}"
            )
    n = int(round(duration / sample_interval)) + 1
    t = np.arange(n) * sample_interval
    samples = np.zeros(n)
    for ev in events:
        samples += ev.render(t)
    if noise_sd > 0:
        samples = samples + np.random.default_rng(seed).normal(0.0, noise_sd, n)
    return Recording(sample_interval=sample_interval, samples=samples, unit=unit)
