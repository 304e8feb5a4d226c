"""Spatial graphs of filament colonies.

A colony is an undirected graph embedded in 3D: nodes are junction points
with micrometre coordinates, edges are filament segments with a physical
length. Graphs round-trip through a small line-oriented text format and can
be grown synthetically with a seeded branching random walk.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import GraphError

FORMAT_HEADER = "# mycograph v1"

# Relative tolerance used when an edge length must agree with node geometry.
_LENGTH_RTOL = 1e-9


@dataclass(frozen=True)
class SpatialGraph:
    """Immutable undirected graph with 3D node positions and edge lengths.

    ``nodes`` is sorted by node id, ``edges`` is sorted by (u, v) with
    u < v. Use :func:`make_graph` to build one from unordered parts; the
    constructor assumes already-normalized input and only validates.
    """

    nodes: tuple[tuple[int, tuple[float, float, float]], ...]
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        ids = [nid for nid, _ in self.nodes]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate node id")
        if ids != sorted(ids):
            raise GraphError("nodes must be sorted by id")
        known = set(ids)
        seen: set[tuple[int, int]] = set()
        for u, v, length in self.edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if u > v:
                raise GraphError(f"edge ({u}, {v}) not normalized to u < v")
            if u not in known or v not in known:
                raise GraphError(f"edge ({u}, {v}) references unknown node")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            if not np.isfinite(length) or length <= 0.0:
                raise GraphError(f"edge ({u}, {v}) has non-positive length {length}")
        for nid, pos in self.nodes:
            if len(pos) != 3 or not all(np.isfinite(c) for c in pos):
                raise GraphError(f"node {nid} has a non-finite position")
        if list(self.edges) != sorted(self.edges, key=lambda e: (e[0], e[1])):
            raise GraphError("edges must be sorted by (u, v)")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def positions(self) -> dict[int, tuple[float, float, float]]:
        return dict(self.nodes)

    @cached_property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(nid for nid, _ in self.nodes)

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {nid: [] for nid in self.node_ids}
        for u, v, _ in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return {nid: tuple(sorted(ns)) for nid, ns in nbrs.items()}

    def mean_degree(self) -> float:
        if not self.nodes:
            return 0.0
        return 2.0 * self.edge_count / self.node_count


def make_graph(
    positions: Mapping[int, Iterable[float]],
    edges: Iterable[tuple],
) -> SpatialGraph:
    """Normalize raw parts into a SpatialGraph.

    ``edges`` entries are (u, v) or (u, v, length); an omitted length is
    filled with the Euclidean distance between the endpoints.
    """
    node_items = tuple(
        (int(nid), (float(p[0]), float(p[1]), float(p[2])))
        for nid, p in sorted(positions.items())
    )
    pos = dict(node_items)
    normalized = []
    for entry in edges:
        if len(entry) == 2:
            u, v = entry
            length = None
        elif len(entry) == 3:
            u, v, length = entry
        else:
            raise GraphError(f"malformed edge entry {entry!r}")
        u, v = int(u), int(v)
        if u > v:
            u, v = v, u
        if length is None:
            if u not in pos or v not in pos:
                raise GraphError(f"edge ({u}, {v}) references unknown node")
            length = float(
                np.linalg.norm(np.subtract(pos[u], pos[v]))
            )
        normalized.append((u, v, float(length)))
    normalized.sort(key=lambda e: (e[0], e[1]))
    return SpatialGraph(nodes=node_items, edges=tuple(normalized))


def load_graph(text: str) -> SpatialGraph:
    """Parse graph-file content. Raises GraphError with a line number."""
    lines = text.splitlines()
    if not lines or lines[0].rstrip() != FORMAT_HEADER:
        raise GraphError(f"line 1: expected header {FORMAT_HEADER!r}")
    positions: dict[int, tuple[float, float, float]] = {}
    edges: list[tuple] = []
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "N":
                if len(fields) != 5:
                    raise ValueError("expected: N <id> <x> <y> <z>")
                nid = int(fields[1])
                if nid in positions:
                    raise ValueError(f"duplicate node id {nid}")
                positions[nid] = (float(fields[2]), float(fields[3]), float(fields[4]))
            elif kind == "E":
                if len(fields) not in (3, 4):
                    raise ValueError("expected: E <u> <v> [length]")
                u, v = int(fields[1]), int(fields[2])
                if len(fields) == 4:
                    edges.append((u, v, float(fields[3])))
                else:
                    edges.append((u, v))
            else:
                raise ValueError(f"unknown record {kind!r}")
        except ValueError as exc:
            raise GraphError(f"line {ln}: {exc}") from None
    try:
        return make_graph(positions, edges)
    except GraphError as exc:
        raise GraphError(str(exc)) from None


def dump_graph(graph: SpatialGraph) -> str:
    """Serialize deterministically: header, nodes by id, edges by (u, v)."""
    out = [FORMAT_HEADER]
    for nid, (x, y, z) in graph.nodes:
        out.append(f"N {nid} {x!r} {y!r} {z!r}")
    for u, v, length in graph.edges:
        out.append(f"E {u} {v} {length!r}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class ColonySpec:
    """Parameters for the synthetic colony generator."""

    node_budget: int = 200
    branching_probability: float = 0.3
    anastomosis_probability: float = 0.1
    step_length_mean: float = 100.0
    step_length_jitter: float = 0.25
    seed: int = 0

    def __post_init__(self) -> None:
        if self.node_budget < 1:
            raise GraphError("node_budget must be >= 1")
        for name in ("branching_probability", "anastomosis_probability"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise GraphError(f"{name} must lie in [0, 1)")
        if self.step_length_mean <= 0.0:
            raise GraphError("step_length_mean must be positive")
        if not 0.0 <= self.step_length_jitter < 1.0:
            raise GraphError("step_length_jitter must lie in [0, 1)")


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return np.array([1.0, 0.0, 0.0])
    return vec / norm


# Direction persistence of a growing tip: smaller means straighter filaments.
_STEER_SIGMA = 0.45


def generate_colony(spec: ColonySpec) -> SpatialGraph:
    """Grow a connected colony by a seeded branching random walk.

    Tips extend one jittered step per round, occasionally branch, and
    occasionally fuse back onto the nearest node within one step length
    (which is what creates cycles). Growth stops at exactly
    ``spec.node_budget`` nodes; identical specs give identical graphs.
    """
    rng = np.random.default_rng(spec.seed)
    positions: list[np.ndarray] = [np.zeros(3)]
    edge_set: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []
    neighbors: dict[int, set[int]] = defaultdict(set)

    def connect(a: int, b: int, length: float) -> None:
        key = (a, b) if a < b else (b, a)
        edge_set.add(key)
        edges.append((key[0], key[1], length))
        neighbors[a].add(b)
        neighbors[b].add(a)

    tips: list[tuple[int, np.ndarray]] = [(0, _unit(rng.standard_normal(3)))]
    while len(positions) < spec.node_budget:
        if not tips:
            # Every tip fused away; restart growth from an existing node.
            origin = int(rng.integers(len(positions)))
            tips = [(origin, _unit(rng.standard_normal(3)))]
        next_tips: list[tuple[int, np.ndarray]] = []
        for nid, direction in tips:
            if len(positions) >= spec.node_budget:
                break
            step = spec.step_length_mean * (
                1.0 + spec.step_length_jitter * rng.uniform(-1.0, 1.0)
            )
            direction = _unit(direction + _STEER_SIGMA * rng.standard_normal(3))
            if spec.anastomosis_probability > 0.0 and rng.random() < spec.anastomosis_probability:
                target = _nearest_fusable(positions, neighbors, nid, step)
                if target is not None:
                    dist = float(np.linalg.norm(positions[nid] - positions[target]))
                    connect(nid, target, dist)
                    continue  # fused tips stop growing
            new_id = len(positions)
            positions.append(positions[nid] + step * direction)
            connect(nid, new_id, step)
            next_tips.append((new_id, direction))
            if rng.random() < spec.branching_probability:
                next_tips.append((new_id, _unit(direction + _STEER_SIGMA * rng.standard_normal(3))))
        tips = next_tips

    node_map = {i: pos for i, pos in enumerate(positions)}
    return make_graph(node_map, edges)


def _nearest_fusable(
    positions: list[np.ndarray],
    neighbors: dict[int, set[int]],
    nid: int,
    radius: float,
) -> int | None:
    """Nearest node within radius that is not nid itself or already adjacent."""
    stack = np.vstack(positions)
    dists = np.linalg.norm(stack - positions[nid], axis=1)
    dists[nid] = np.inf
    for adjacent in neighbors[nid]:
        dists[adjacent] = np.inf
    best = int(np.argmin(dists))
    if dists[best] <= radius and dists[best] > 1e-12:
        return best
    return None


def connected_components(graph: SpatialGraph) -> list[list[int]]:
    """Connected components as sorted node-id lists, largest first.

    Ties in size are broken by the smallest node id contained.
    """
    unvisited = set(graph.node_ids)
    adjacency = graph.adjacency
    components: list[list[int]] = []
    for start in graph.node_ids:  # deterministic scan order
        if start not in unvisited:
            continue
        queue = deque([start])
        unvisited.discard(start)
        comp = [start]
        while queue:
            cur = queue.popleft()
            for nbr in adjacency[cur]:
                if nbr in unvisited:
                    unvisited.discard(nbr)
                    comp.append(nbr)
                    queue.append(nbr)
        components.append(sorted(comp))
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def largest_component(graph: SpatialGraph) -> SpatialGraph:
    """Induced subgraph on the largest connected component.

    Node ids, positions and edge lengths are preserved.
    """
    if graph.node_count == 0:
        raise GraphError("empty graph has no components")
    keep = set(connected_components(graph)[0])
    nodes = {nid: pos for nid, pos in graph.nodes if nid in keep}
    edges = [e for e in graph.edges if e[0] in keep]
    return make_graph(nodes, edges)
