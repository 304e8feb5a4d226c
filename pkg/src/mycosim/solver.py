"""Transient and DC solution of RC/memristor netlists.

Nodal formulation with one auxiliary current unknown per voltage source.
Capacitors enter through companion conductances, so for a fixed step the
system matrix of a pure RC netlist is constant: it is factored once and
the whole run reduces to a dense step recursion executed by the kernel
backend. Memristive netlists restamp and refactor every step, advancing
each device state explicitly from the previous step's branch voltage.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import _kernels
from .circuit import Capacitor, MemristorElement, Netlist, PulseSource, Resistor
from .errors import SolverError
from .memristor import MemristorModel, step_state
from .waveform import PulseSpec

MAX_STEPS = 100_000_000


class IntegrationMethod(Enum):
    TRAPEZOIDAL = "trapezoidal"
    BACKWARD_EULER = "backward-euler"


@dataclass(frozen=True)
class TransientConfig:
    """Uniform-step time grid plus integration rule."""

    t_stop: float = 2e-4
    dt: float = 5e-8
    method: IntegrationMethod = IntegrationMethod.TRAPEZOIDAL

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise SolverError("dt must be finite and positive")
        if not (np.isfinite(self.t_stop) and self.t_stop >= self.dt):
            raise SolverError("t_stop must be finite and >= dt")
        if self.steps > MAX_STEPS:
            raise SolverError(f"{self.steps} steps exceeds the {MAX_STEPS} step limit")

    @property
    def steps(self) -> int:
        return int(round(self.t_stop / self.dt))


@dataclass(frozen=True)
class TransientResult:
    """Node voltages over a uniform time grid; row index = netlist node."""

    times: np.ndarray
    voltages: np.ndarray

    def voltage(self, node: int) -> np.ndarray:
        return self.voltages[node]

    def final(self, node: int) -> float:
        return float(self.voltages[node, -1])

    def peak_abs(self, node: int) -> float:
        return float(np.max(np.abs(self.voltages[node])))

    def to_csv(self, probe: Sequence[int] | None = None) -> str:
        """CSV with a time column and one full-precision column per node."""
        nodes = list(range(self.voltages.shape[0])) if probe is None else list(probe)
        lines = ["t," + ",".join(str(n) for n in nodes)]
        for k, t in enumerate(self.times):
            row = ",".join(repr(float(self.voltages[n, k])) for n in nodes)
            lines.append(f"{float(t)!r},{row}")
        return "\n".join(lines) + "\n"


def _merge_sources(
    netlist: Netlist, sources: Sequence[tuple[int, PulseSpec]]
) -> list[tuple[int, PulseSpec]]:
    merged = [(el.node, el.pulse) for el in netlist.sources()]
    for node, pulse in sources:
        node = int(node)
        if not 0 < node < netlist.node_count:
            raise SolverError(f"source node {node} invalid (ground or out of range)")
        if not isinstance(pulse, PulseSpec):
            raise SolverError("sources must pair a node with a PulseSpec")
        merged.append((node, pulse))
    return merged


def _assemble(netlist: Netlist, source_nodes: Sequence[int]):
    """Build G, C and the source-injection columns E.

    Unknown ordering: node voltages 1..N-1 first, then one current per
    source. Ground rows/columns are eliminated by omission. Memristor
    branches are returned unstamped; they change per step.
    """
    n = netlist.node_count - 1
    m = len(source_nodes)
    dim = n + m
    G = np.zeros((dim, dim))
    C = np.zeros((dim, dim))

    def stamp(mat: np.ndarray, a: int, b: int, val: float) -> None:
        if a > 0:
            mat[a - 1, a - 1] += val
        if b > 0:
            mat[b - 1, b - 1] += val
        if a > 0 and b > 0:
            mat[a - 1, b - 1] -= val
            mat[b - 1, a - 1] -= val

    memristors: list[MemristorElement] = []
    for el in netlist.elements:
        if isinstance(el, Resistor):
            stamp(G, el.a, el.b, 1.0 / el.ohms)
        elif isinstance(el, Capacitor):
            stamp(C, el.a, el.b, el.farads)
        elif isinstance(el, MemristorElement):
            memristors.append(el)
    if netlist.gmin > 0.0:
        for k in range(n):
            G[k, k] += netlist.gmin
    for j, node in enumerate(source_nodes):
        r = n + j
        G[node - 1, r] += 1.0
        G[r, node - 1] += 1.0
    E = np.zeros((dim, m))
    for j in range(m):
        E[n + j, j] = 1.0
    return G, C, E, memristors


def _checked_lu(A: np.ndarray, n_nodes: int):
    """LU factorization that reports rank deficiency as a solver error."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = lu_factor(A, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.size:
        scale = diag.max()
        bad = np.flatnonzero((diag == 0.0) | (diag < scale * 1e-14))
        if bad.size:
            i = int(bad[0])
            what = f"node {i + 1}" if i < n_nodes else f"source {i - n_nodes + 1}"
            raise SolverError(f"singular system matrix at the unknown for {what}")
    return lu, piv


def _step_operators(G: np.ndarray, C: np.ndarray, n_aux: int, config: TransientConfig):
    """System matrix A and history matrix B for one step.

    Source-constraint rows are algebraic, so they are never time-averaged:
    the trapezoidal rule applies to the differential rows only and every
    constraint row enforces the drive value at the new time exactly.
    """
    if config.method is IntegrationMethod.TRAPEZOIDAL:
        alpha = 2.0 / config.dt
        A = G + alpha * C
        B = alpha * C - G
        if n_aux:
            B[-n_aux:, :] = 0.0
    else:
        alpha = 1.0 / config.dt
        A = G + alpha * C
        B = alpha * C
    return A, B


def simulate(
    netlist: Netlist,
    sources: Sequence[tuple[int, PulseSpec]] = (),
    config: TransientConfig | None = None,
) -> TransientResult:
    """Transient response from a zero initial state.

    ``sources`` adds pulse drives on top of any sources embedded in the
    netlist. Returns voltages for every node including ground (row 0).
    """
    if config is None:
        config = TransientConfig()
    merged = _merge_sources(netlist, sources)
    source_nodes = [node for node, _ in merged]
    K = config.steps
    times = np.arange(K + 1) * config.dt
    n = netlist.node_count - 1
    m = len(merged)
    if m:
        W = np.vstack([pulse.values(times) for _, pulse in merged])
    else:
        W = np.zeros((0, K + 1))
    U = np.ascontiguousarray(W[:, 1:])

    G, C, E, memristors = _assemble(netlist, source_nodes)
    dim = n + m
    voltages = np.zeros((netlist.node_count, K + 1))
    if dim == 0:
        return TransientResult(times=times, voltages=voltages)

    if not memristors:
        A, B = _step_operators(G, C, m, config)
        lu = _checked_lu(A, n)
        M = np.ascontiguousarray(lu_solve(lu, B, check_finite=False))
        S = np.ascontiguousarray(lu_solve(lu, E, check_finite=False))
        x0 = np.zeros(dim)
        X, bad = _kernels.transient_steps(M, S, U, x0)
        if bad >= 0:
            raise SolverError(f"non-finite state at t = {bad * config.dt:.6g} s")
        voltages[1:, :] = X[:, :n].T
        return TransientResult(times=times, voltages=voltages)

    return _simulate_memristive(
        netlist, memristors, G, C, E, U, config, times, voltages
    )


def _simulate_memristive(netlist, memristors, G, C, E, U, config, times, voltages):
    """Per-step restamp path; device states lag the solve by one step."""
    n = netlist.node_count - 1
    m = E.shape[1]
    dim = n + m
    K = U.shape[1]
    models: list[MemristorModel] = [el.model for el in memristors]
    x = np.zeros(dim)

    def branch_volts(el: MemristorElement, state: np.ndarray) -> float:
        va = state[el.a - 1] if el.a > 0 else 0.0
        vb = state[el.b - 1] if el.b > 0 else 0.0
        return float(va - vb)

    def stamped(base: np.ndarray, conductances: list[float]) -> np.ndarray:
        mat = base.copy()
        for el, g in zip(memristors, conductances):
            if el.a > 0:
                mat[el.a - 1, el.a - 1] += g
            if el.b > 0:
                mat[el.b - 1, el.b - 1] += g
            if el.a > 0 and el.b > 0:
                mat[el.a - 1, el.b - 1] -= g
                mat[el.b - 1, el.a - 1] -= g
        return mat

    g_prev = [1.0 / mod.resistance() for mod in models]
    for k in range(K):
        models = [
            step_state(mod, branch_volts(el, x), config.dt)
            for el, mod in zip(memristors, models)
        ]
        g_new = [1.0 / mod.resistance() for mod in models]
        G_old = stamped(G, g_prev)
        G_new = stamped(G, g_new)
        if config.method is IntegrationMethod.TRAPEZOIDAL:
            alpha = 2.0 / config.dt
            A = G_new + alpha * C
            B = alpha * C - G_old
            if m:
                B[-m:, :] = 0.0
        else:
            alpha = 1.0 / config.dt
            A = G_new + alpha * C
            B = alpha * C
        rhs = B @ x + E @ U[:, k]
        lu = _checked_lu(A, n)
        x = lu_solve(lu, rhs, check_finite=False)
        if not np.isfinite(x.sum()):
            raise SolverError(f"non-finite state at t = {(k + 1) * config.dt:.6g} s")
        voltages[1:, k + 1] = x[:n]
        g_prev = g_new
    return TransientResult(times=times, voltages=voltages)


def dc_operating_point(
    netlist: Netlist, sources: Sequence[tuple[int, float]] = ()
) -> np.ndarray:
    """Resistive solve with capacitors open-circuited.

    ``sources`` holds (node, volts) pairs. Pulse sources embedded in the
    netlist are held at their plateau amplitude. Memristors contribute
    their resistance at the current state. Returns one voltage per node,
    ground included.
    """
    drives: list[tuple[int, float]] = [
        (el.node, el.pulse.amplitude) for el in netlist.sources()
    ]
    for node, volts in sources:
        node = int(node)
        if not 0 < node < netlist.node_count:
            raise SolverError(f"source node {node} invalid (ground or out of range)")
        if not np.isfinite(volts):
            raise SolverError("source voltage must be finite")
        drives.append((node, float(volts)))
    source_nodes = [node for node, _ in drives]
    G, _, E, memristors = _assemble(netlist, source_nodes)
    n = netlist.node_count - 1
    for el in memristors:
        g = 1.0 / el.model.resistance()
        if el.a > 0:
            G[el.a - 1, el.a - 1] += g
        if el.b > 0:
            G[el.b - 1, el.b - 1] += g
        if el.a > 0 and el.b > 0:
            G[el.a - 1, el.b - 1] -= g
            G[el.b - 1, el.a - 1] -= g
    out = np.zeros(netlist.node_count)
    dim = G.shape[0]
    if dim == 0:
        return out
    b = np.zeros(dim)
    for j, (_, volts) in enumerate(drives):
        b[n + j] = volts
    lu = _checked_lu(G, n)
    x = lu_solve(lu, b, check_finite=False)
    if not np.isfinite(x.sum()):
        raise SolverError("non-finite DC solution")
    out[1:] = x[:n]
    return out
