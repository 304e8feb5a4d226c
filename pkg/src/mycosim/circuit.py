"""Netlists and the mapping from spatial graphs to RC networks.

Node index 0 is always the ground reference. The builder puts the smallest
graph node id there by default; :func:`swap_ground` relabels any other node
onto index 0 when electrodes are placed at simulation setup.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import NetlistError
from .graph import SpatialGraph
from .memristor import MemristorModel
from .waveform import PulseSpec

if TYPE_CHECKING:
    from .solver import TransientConfig


@dataclass(frozen=True)
class Resistor:
    a: int
    b: int
    ohms: float


@dataclass(frozen=True)
class Capacitor:
    a: int
    b: int
    farads: float


@dataclass(frozen=True)
class MemristorElement:
    a: int
    b: int
    model: MemristorModel


@dataclass(frozen=True)
class PulseSource:
    """Ideal pulsed voltage source from ``node`` to ground."""

    node: int
    pulse: PulseSpec


Element = Resistor | Capacitor | MemristorElement | PulseSource


class Topology(str, Enum):
    """How one filament edge turns into circuit elements."""

    SERIAL = "serial"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class RcParams:
    """Element scaling for the graph-to-netlist build.

    resistance_per_length is ohms per micrometre of filament,
    capacitance_per_length farads per micrometre. gmin is a leak
    conductance tied from every non-ground node to ground so the DC
    system stays solvable even for capacitively-isolated nodes.
    """

    topology: Topology = Topology.PARALLEL
    resistance_per_length: float = 10.0
    capacitance_per_length: float = 1e-14
    gmin: float = 1e-12

    def __post_init__(self) -> None:
        if self.resistance_per_length <= 0.0 or self.capacitance_per_length <= 0.0:
            raise NetlistError("per-length element values must be positive")
        if self.gmin < 0.0 or not np.isfinite(self.gmin):
            raise NetlistError("gmin must be finite and >= 0")


@dataclass(frozen=True)
class Netlist:
    """Flat element list over integer nodes; node 0 is ground.

    ``origin`` records where each node index came from: ("node", id) for a
    graph node, ("edge", u, v) for an internal node introduced by the
    serial topology. Hand-built netlists may omit it.
    """

    node_count: int
    elements: tuple[Element, ...]
    gmin: float = 0.0
    origin: tuple[tuple, ...] | None = None

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise NetlistError("node_count must be >= 1")
        if self.gmin < 0.0 or not np.isfinite(self.gmin):
            raise NetlistError("gmin must be finite and >= 0")
        if self.origin is not None and len(self.origin) != self.node_count:
            raise NetlistError("origin must list every node index")
        for el in self.elements:
            if isinstance(el, PulseSource):
                self._check_node(el.node)
                if el.node == 0:
                    raise NetlistError("source node must not be ground")
                continue
            self._check_node(el.a)
            self._check_node(el.b)
            if el.a == el.b:
                raise NetlistError(f"element shorts node {el.a} to itself")
            if isinstance(el, Resistor) and not (np.isfinite(el.ohms) and el.ohms > 0.0):
                raise NetlistError(f"resistor ({el.a}, {el.b}) must have positive ohms")
            if isinstance(el, Capacitor) and not (np.isfinite(el.farads) and el.farads > 0.0):
                raise NetlistError(f"capacitor ({el.a}, {el.b}) must have positive farads")
        self._check_grounding()

    def _check_node(self, idx: int) -> None:
        if not 0 <= idx < self.node_count:
            raise NetlistError(f"element references node {idx} outside 0..{self.node_count - 1}")

    def _check_grounding(self) -> None:
        # With a leak every node sees ground; otherwise walk the resistive
        # skeleton (resistors, memristors, sources) and demand full reach.
        if self.gmin > 0.0 or self.node_count == 1:
            return
        adj: dict[int, list[int]] = {k: [] for k in range(self.node_count)}
        for el in self.elements:
            if isinstance(el, (Resistor, MemristorElement)):
                adj[el.a].append(el.b)
                adj[el.b].append(el.a)
            elif isinstance(el, PulseSource):
                adj[el.node].append(0)
                adj[0].append(el.node)
        seen = {0}
        stack = [0]
        while stack:
            cur = stack.pop()
            for nbr in adj[cur]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        if len(seen) != self.node_count:
            missing = min(set(range(self.node_count)) - seen)
            raise NetlistError(f"node {missing} floats in the resistive skeleton")

    def resistors(self) -> list[Resistor]:
        return [el for el in self.elements if isinstance(el, Resistor)]

    def capacitors(self) -> list[Capacitor]:
        return [el for el in self.elements if isinstance(el, Capacitor)]

    def memristors(self) -> list[MemristorElement]:
        return [el for el in self.elements if isinstance(el, MemristorElement)]

    def sources(self) -> list[PulseSource]:
        return [el for el in self.elements if isinstance(el, PulseSource)]

    def node_of_graph_id(self, node_id: int) -> int:
        """Netlist index of a graph node, via the origin record."""
        if self.origin is None:
            raise NetlistError("netlist carries no origin record")
        for idx, tag in enumerate(self.origin):
            if tag[0] == "node" and tag[1] == node_id:
                return idx
        raise NetlistError(f"graph node {node_id} not in netlist")


def build_rc_network(graph: SpatialGraph, params: RcParams) -> Netlist:
    """Turn a spatial graph into an RC netlist.

    Parallel topology: each edge becomes R parallel C between its
    endpoints, node_count equals the graph node count. Serial topology:
    each edge becomes R from the lower-id endpoint to a fresh internal
    node, then C onward to the higher-id endpoint, so node_count equals
    nodes + edges.
    """
    if graph.node_count == 0:
        raise NetlistError("cannot build a netlist from an empty graph")
    index_of = {nid: i for i, nid in enumerate(graph.node_ids)}
    rho = params.resistance_per_length
    kappa = params.capacitance_per_length
    elements: list[Element] = []
    origin: list[tuple] = [("node", nid) for nid in graph.node_ids]
    if params.topology is Topology.PARALLEL:
        for u, v, length in graph.edges:
            elements.append(Resistor(index_of[u], index_of[v], rho * length))
            elements.append(Capacitor(index_of[u], index_of[v], kappa * length))
        node_count = graph.node_count
    else:
        node_count = graph.node_count
        for u, v, length in graph.edges:
            mid = node_count
            node_count += 1
            origin.append(("edge", u, v))
            elements.append(Resistor(index_of[u], mid, rho * length))
            elements.append(Capacitor(mid, index_of[v], kappa * length))
    return Netlist(
        node_count=node_count,
        elements=tuple(elements),
        gmin=params.gmin,
        origin=tuple(origin),
    )


def swap_ground(netlist: Netlist, node: int) -> Netlist:
    """Relabel ``node`` onto index 0 (and the old 0 onto ``node``).

    Pure permutation of node labels, so the circuit is unchanged apart
    from which node the solver holds at the reference potential.
    """
    if not 0 <= node < netlist.node_count:
        raise NetlistError(f"ground node {node} outside 0..{netlist.node_count - 1}")
    if node == 0:
        return netlist

    def remap(idx: int) -> int:
        if idx == 0:
            return node
        if idx == node:
            return 0
        return idx

    elements: list[Element] = []
    for el in netlist.elements:
        if isinstance(el, PulseSource):
            elements.append(PulseSource(remap(el.node), el.pulse))
        elif isinstance(el, Resistor):
            elements.append(Resistor(remap(el.a), remap(el.b), el.ohms))
        elif isinstance(el, Capacitor):
            elements.append(Capacitor(remap(el.a), remap(el.b), el.farads))
        else:
            elements.append(MemristorElement(remap(el.a), remap(el.b), el.model))
    origin = None
    if netlist.origin is not None:
        swapped = list(netlist.origin)
        swapped[0], swapped[node] = swapped[node], swapped[0]
        origin = tuple(swapped)
    return Netlist(
        node_count=netlist.node_count,
        elements=tuple(elements),
        gmin=netlist.gmin,
        origin=origin,
    )


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def export_netlist_text(
    netlist: Netlist,
    stimulus: Sequence[tuple[int, PulseSpec]] = (),
    config: "TransientConfig | None" = None,
) -> str:
    """Render the netlist in conventional simulator syntax.

    One element per line, node 0 as ground, pulse sources in
    PULSE(...) form, a .tran directive when a config is given, .end
    last. Output is deterministic. Memristors have no portable element
    syntax and are rejected.
    """
    if netlist.memristors():
        raise NetlistError("memristor export unsupported")
    lines = ["* mycosim netlist"]
    rn = 0
    for el in netlist.resistors():
        rn += 1
        lines.append(f"R{rn} {el.a} {el.b} {_fmt(el.ohms)}")
    if netlist.gmin > 0.0:
        leak_ohms = 1.0 / netlist.gmin
        for k in range(1, netlist.node_count):
            rn += 1
            lines.append(f"R{rn} {k} 0 {_fmt(leak_ohms)}")
    for cn, el in enumerate(netlist.capacitors(), start=1):
        lines.append(f"C{cn} {el.a} {el.b} {_fmt(el.farads)}")
    drives: list[tuple[int, PulseSpec]] = [(s.node, s.pulse) for s in netlist.sources()]
    for node, pulse in stimulus:
        if not 0 < node < netlist.node_count:
            raise NetlistError(f"stimulus node {node} invalid (ground or out of range)")
        drives.append((node, pulse))
    for vn, (node, pulse) in enumerate(drives, start=1):
        fields = " ".join(
            _fmt(x)
            for x in (0.0, pulse.amplitude, pulse.delay, pulse.rise, pulse.fall, pulse.width, pulse.period)
        )
        lines.append(f"V{vn} {node} 0 PULSE({fields})")
    if config is not None:
        lines.append(f".tran {_fmt(config.dt)} {_fmt(config.t_stop)}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def netlist_to_json(netlist: Netlist) -> dict:
    """JSON-ready dict for saving a netlist between CLI steps."""
    elements = []
    for el in netlist.elements:
        if isinstance(el, Resistor):
            elements.append(["R", el.a, el.b, el.ohms])
        elif isinstance(el, Capacitor):
            elements.append(["C", el.a, el.b, el.farads])
        elif isinstance(el, MemristorElement):
            m = el.model
            elements.append(
                ["M", el.a, el.b,
                 {"r_on": m.r_on, "r_off": m.r_off, "w": m.w,
                  "mobility": m.mobility, "window_p": m.window_p}]
            )
        else:
            p = el.pulse
            elements.append(
                ["V", el.node,
                 {"amplitude": p.amplitude, "delay": p.delay, "rise": p.rise,
                  "fall": p.fall, "width": p.width, "period": p.period}]
            )
    return {
        "format": "mycosim-netlist v1",
        "node_count": netlist.node_count,
        "gmin": netlist.gmin,
        "elements": elements,
        "origin": list(list(tag) for tag in netlist.origin) if netlist.origin else None,
    }


def netlist_from_json(data: dict) -> Netlist:
    allowed = {"format", "node_count", "gmin", "elements", "origin"}
    unknown = set(data) - allowed
    if unknown:
        raise NetlistError(f"unknown netlist key {sorted(unknown)[0]!r}")
    if data.get("format") != "mycosim-netlist v1":
        raise NetlistError("unrecognized netlist format tag")
    elements: list[Element] = []
    for entry in data["elements"]:
        kind = entry[0]
        if kind == "R":
            elements.append(Resistor(int(entry[1]), int(entry[2]), float(entry[3])))
        elif kind == "C":
            elements.append(Capacitor(int(entry[1]), int(entry[2]), float(entry[3])))
        elif kind == "M":
            elements.append(
                MemristorElement(int(entry[1]), int(entry[2]), MemristorModel(**entry[3]))
            )
        elif kind == "V":
            elements.append(PulseSource(int(entry[1]), PulseSpec(**entry[2])))
        else:
            raise NetlistError(f"unknown element kind {kind!r}")
    origin = None
    if data.get("origin") is not None:
        origin = tuple(tuple(tag) for tag in data["origin"])
    return Netlist(
        node_count=int(data["node_count"]),
        elements=tuple(elements),
        gmin=float(data["gmin"]),
        origin=origin,
    )
