"""Mining Boolean gates out of RC colony networks.

A trial drops four distinct electrodes (two inputs, ground, output) onto
random nodes of the largest component, pulses every combination of the
two inputs, and records the peak output voltage per pattern. Sweeping a
decision threshold over the responses turns each trial into one gate
class per threshold; an ensemble of trials gives a count histogram.

Only gates with a quiet (0,0) row are reachable: the no-input response
is zero by definition in a passive network, so the classifier covers the
eight such classes and nothing else.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import _kernels
from .circuit import Netlist, RcParams, build_rc_network, swap_ground
from .errors import GateMinerError, SolverError
from .graph import SpatialGraph, largest_component
from .solver import IntegrationMethod, TransientConfig, simulate
from .waveform import PulseSpec

#: Input patterns in response order; a pattern is (x, y).
PATTERNS = ((0, 0), (0, 1), (1, 0), (1, 1))

#: Amplitude-bound slack for asserting passivity of measured responses.
RESPONSE_TOL = 1e-9


class GateClass(Enum):
    FALSE = "FALSE"
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    AND_NOT_A = "AND_NOT_A"  # true only for (0,1): not-x and y
    AND_NOT_B = "AND_NOT_B"  # true only for (1,0): x and not-y
    SELECT_A = "SELECT_A"  # output follows x
    SELECT_B = "SELECT_B"  # output follows y


# (b01, b10, b11) bit triple over patterns (0,1), (1,0), (1,1).
_BITS_TO_CLASS: dict[tuple[int, int, int], GateClass] = {
    (0, 0, 0): GateClass.FALSE,
    (0, 0, 1): GateClass.AND,
    (0, 1, 0): GateClass.AND_NOT_B,
    (1, 0, 0): GateClass.AND_NOT_A,
    (0, 1, 1): GateClass.SELECT_A,
    (1, 0, 1): GateClass.SELECT_B,
    (1, 1, 0): GateClass.XOR,
    (1, 1, 1): GateClass.OR,
}

#: Histogram column order, also the CSV header order.
GROUP_COLUMNS = ("AND", "OR", "ANDNOT", "SELECT", "XOR", "FALSE")

_GROUP_OF_CLASS = {
    GateClass.AND: "AND",
    GateClass.OR: "OR",
    GateClass.AND_NOT_A: "ANDNOT",
    GateClass.AND_NOT_B: "ANDNOT",
    GateClass.SELECT_A: "SELECT",
    GateClass.SELECT_B: "SELECT",
    GateClass.XOR: "XOR",
    GateClass.FALSE: "FALSE",
}

# code = b01*4 + b10*2 + b11 -> column index in GROUP_COLUMNS
_CODE_TO_COLUMN = np.array([5, 0, 2, 3, 2, 3, 4, 1], dtype=np.int64)


def group_of(gate: GateClass) -> str:
    return _GROUP_OF_CLASS[gate]


def default_thresholds() -> np.ndarray:
    """The canonical 500-point decision sweep: 0.0001..0.05 V."""
    return np.arange(1, 501) * 1e-4


@dataclass(frozen=True)
class ElectrodeAssignment:
    """Graph node ids for the four electrode roles."""

    input_a: int
    input_b: int
    ground: int
    output: int

    def __post_init__(self) -> None:
        ids = (self.input_a, self.input_b, self.ground, self.output)
        if len(set(ids)) != 4:
            raise GateMinerError(f"electrode nodes must be distinct, got {ids}")


@dataclass(frozen=True)
class TruthTableOutcome:
    """Peak |V(output)| per input pattern, plus the drive amplitude."""

    responses: tuple[float, float, float, float]
    amplitude: float

    def __post_init__(self) -> None:
        if self.responses[0] != 0.0:
            raise GateMinerError("the (0,0) response must be exactly zero")
        bound = abs(self.amplitude) + RESPONSE_TOL
        for pattern, r in zip(PATTERNS, self.responses):
            if not np.isfinite(r) or r < 0.0 or r > bound:
                raise GateMinerError(
                    f"response {r!r} for pattern {pattern} breaks passivity"
                )


def classify(outcome: TruthTableOutcome, theta: float) -> GateClass:
    """Binarize responses at theta and look the bit triple up."""
    if theta <= 0.0:
        raise GateMinerError("theta must be positive")
    _, r01, r10, r11 = outcome.responses
    bits = (int(r01 > theta), int(r10 > theta), int(r11 > theta))
    return _BITS_TO_CLASS[bits]


def _mining_config() -> TransientConfig:
    # Backward Euler keeps peaks inside [0, amplitude]; the trapezoidal
    # rule can ring a few 1e-5 V past the rail at this coarse a step.
    return TransientConfig(method=IntegrationMethod.BACKWARD_EULER)


def measure_truth_table(
    netlist: Netlist,
    assignment: ElectrodeAssignment,
    pulse: PulseSpec | None = None,
    config: TransientConfig | None = None,
) -> TruthTableOutcome:
    """Simulate the three driven input patterns of one electrode layout.

    The ground electrode is rebound to node 0, pulse sources attach to
    the inputs that are logic 1, and nothing attaches for logic 0, so
    the (0,0) response is 0 V with no simulation at all.
    """
    if pulse is None:
        pulse = PulseSpec()
    if config is None:
        config = _mining_config()
    g_idx = netlist.node_of_graph_id(assignment.ground)
    bound = swap_ground(netlist, g_idx)

    def electrode(node_id: int) -> int:
        idx = netlist.node_of_graph_id(node_id)
        if idx == 0:
            return g_idx
        if idx == g_idx:
            return 0
        return idx

    a_idx = electrode(assignment.input_a)
    b_idx = electrode(assignment.input_b)
    out_idx = electrode(assignment.output)
    responses = [0.0]
    for x, y in PATTERNS[1:]:
        drives = []
        if x:
            drives.append((a_idx, pulse))
        if y:
            drives.append((b_idx, pulse))
        try:
            result = simulate(bound, drives, config)
        except SolverError as exc:
            raise SolverError(f"pattern ({x},{y}): {exc}") from exc
        responses.append(result.peak_abs(out_idx))
    return TruthTableOutcome(responses=tuple(responses), amplitude=pulse.amplitude)


@dataclass(frozen=True)
class GateHistogram:
    """Per-threshold gate counts over an ensemble of electrode trials.

    ``counts`` has one row per threshold and one column per entry of
    GROUP_COLUMNS. ``outcomes`` optionally keeps the raw responses, one
    row per trial (nan rows mark failed trials); it never enters the CSV.
    """

    thresholds: np.ndarray
    counts: np.ndarray
    metadata: dict
    outcomes: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.counts.shape != (self.thresholds.size, len(GROUP_COLUMNS)):
            raise GateMinerError("counts shape must be (thresholds, groups)")
        if np.any(self.counts < 0):
            raise GateMinerError("counts must be non-negative")
        trials = self.metadata.get("trials")
        failures = self.metadata.get("failures")
        if trials is not None and failures is not None:
            completed = trials - len(failures)
            sums = self.counts.sum(axis=1)
            if np.any(sums != completed):
                raise GateMinerError(
                    "per-threshold counts must sum to the completed trial count"
                )

    def column(self, group: str) -> np.ndarray:
        return self.counts[:, GROUP_COLUMNS.index(group)]

    def to_csv(self) -> str:
        lines = ["theta," + ",".join(GROUP_COLUMNS)]
        for i, theta in enumerate(self.thresholds):
            row = ",".join(str(int(c)) for c in self.counts[i])
            lines.append(f"{theta:.4f},{row}")
        return "\n".join(lines) + "\n"


def _accumulate(counts: np.ndarray, thresholds: np.ndarray, responses) -> None:
    _, r01, r10, r11 = responses
    code = (
        (thresholds < r01).astype(np.int64) * 4
        + (thresholds < r10).astype(np.int64) * 2
        + (thresholds < r11).astype(np.int64)
    )
    counts[np.arange(thresholds.size), _CODE_TO_COLUMN[code]] += 1


def _mine_block(args) -> tuple[np.ndarray, list[int], np.ndarray | None]:
    (netlist, comp_ids, pulse, config, thresholds, seed, t0, t1, capture) = args
    counts = np.zeros((thresholds.size, len(GROUP_COLUMNS)), dtype=np.int64)
    failures: list[int] = []
    outs = np.full((t1 - t0, 4), np.nan) if capture else None
    for trial in range(t0, t1):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
        )
        pick = rng.choice(comp_ids.size, size=4, replace=False)
        assignment = ElectrodeAssignment(
            input_a=int(comp_ids[pick[0]]),
            input_b=int(comp_ids[pick[1]]),
            ground=int(comp_ids[pick[2]]),
            output=int(comp_ids[pick[3]]),
        )
        try:
            outcome = measure_truth_table(netlist, assignment, pulse, config)
        except SolverError:
            failures.append(trial)
            continue
        _accumulate(counts, thresholds, outcome.responses)
        if outs is not None:
            outs[trial - t0] = outcome.responses
    return counts, failures, outs


def mine(
    graph: SpatialGraph,
    params: RcParams,
    *,
    trials: int = 1000,
    seed: int = 0,
    pulse: PulseSpec | None = None,
    config: TransientConfig | None = None,
    thresholds: np.ndarray | None = None,
    jobs: int = 1,
    capture_outcomes: bool = False,
) -> GateHistogram:
    """Run the electrode-assignment ensemble over one fixed netlist.

    Each trial re-randomizes only the electrode placement; the netlist is
    built once from the graph's largest component. Trial seeds derive
    from (seed, trial index), so results do not depend on ``jobs`` and
    reruns are bit-identical. Solver failures skip the affected trial and
    are recorded in the metadata.
    """
    if trials < 1:
        raise GateMinerError("trials must be >= 1")
    if jobs < 1:
        raise GateMinerError("jobs must be >= 1")
    if pulse is None:
        pulse = PulseSpec()
    if config is None:
        config = _mining_config()
    if thresholds is None:
        thresholds = default_thresholds()
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.size == 0 or np.any(np.diff(thresholds) <= 0) or thresholds[0] <= 0:
        raise GateMinerError("thresholds must be positive and strictly increasing")

    component = largest_component(graph)
    if component.node_count < 4:
        raise GateMinerError(
            f"largest component has {component.node_count} nodes; need at least 4"
        )
    netlist = build_rc_network(component, params)
    comp_ids = np.asarray(component.node_ids, dtype=np.int64)

    blocks = _split_blocks(trials, jobs)
    args = [
        (netlist, comp_ids, pulse, config, thresholds, seed, t0, t1, capture_outcomes)
        for t0, t1 in blocks
    ]
    if jobs == 1 or len(blocks) == 1:
        results = [_mine_block(a) for a in args]
    else:
        # Touch the kernel once so forked workers inherit the compiled code.
        _kernels.transient_steps(
            np.zeros((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)), np.zeros(1)
        )
        with multiprocessing.Pool(processes=jobs) as pool:
            results = pool.map(_mine_block, args)

    counts = np.zeros((thresholds.size, len(GROUP_COLUMNS)), dtype=np.int64)
    failures: list[int] = []
    outcome_rows: list[np.ndarray] = []
    for block_counts, block_failures, block_outs in results:
        counts += block_counts
        failures.extend(block_failures)
        if capture_outcomes:
            outcome_rows.append(block_outs)
    metadata = {
        "topology": params.topology.value,
        "seed": seed,
        "trials": trials,
        "failures": sorted(failures),
    }
    outcomes = np.vstack(outcome_rows) if capture_outcomes else None
    return GateHistogram(
        thresholds=thresholds, counts=counts, metadata=metadata, outcomes=outcomes
    )


def _split_blocks(trials: int, jobs: int) -> list[tuple[int, int]]:
    jobs = min(jobs, trials)
    base, extra = divmod(trials, jobs)
    blocks = []
    start = 0
    for j in range(jobs):
        size = base + (1 if j < extra else 0)
        blocks.append((start, start + size))
        start += size
    return blocks


def trend_summary(hist: GateHistogram) -> dict:
    """Shape descriptors of a mined histogram.

    Per gate group: the first threshold from which the count stays zero
    (None if it never dies out) and the threshold of the count maximum.
    Overall: the log-log least-squares slope of the total non-FALSE count
    over thresholds with a positive count (None if fewer than two).
    """
    thetas = hist.thresholds
    groups: dict[str, dict] = {}
    for name in GROUP_COLUMNS:
        if name == "FALSE":
            continue
        col = hist.column(name)
        nonzero = np.flatnonzero(col)
        if nonzero.size == 0:
            extinction = float(thetas[0])
        elif nonzero[-1] + 1 < thetas.size:
            extinction = float(thetas[nonzero[-1] + 1])
        else:
            extinction = None
        peak = int(np.argmax(col))
        groups[name] = {
            "theta_extinction": extinction,
            "theta_argmax": float(thetas[peak]),
            "count_max": int(col[peak]),
        }
    nonfalse = hist.counts[:, : len(GROUP_COLUMNS) - 1].sum(axis=1)
    mask = nonfalse > 0
    slope = None
    if mask.sum() >= 2:
        slope = float(
            np.polyfit(np.log(thetas[mask]), np.log(nonfalse[mask]), 1)[0]
        )
    return {"groups": groups, "nonfalse_loglog_slope": slope}
