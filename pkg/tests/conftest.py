"""Shared fixtures: small hand-checkable circuits and a reusable colony."""

import pytest

from mycosim import (
    ColonySpec,
    ElectrodeAssignment,
    Netlist,
    RcParams,
    Resistor,
    build_rc_network,
    generate_colony,
    make_graph,
)


@pytest.fixture(scope="session")
def star_graph():
    """Four nodes: center 1, leaves 2..4, each arm 100 um long."""
    return make_graph(
        {1: (0, 0, 0), 2: (100, 0, 0), 3: (0, 100, 0), 4: (0, 0, 100)},
        [(1, 2), (1, 3), (1, 4)],
    )


@pytest.fixture(scope="session")
def star_netlist(star_graph):
    """Star as a netlist: 1 kOhm per arm, no leak, so values stay exact."""
    return build_rc_network(star_graph, RcParams(gmin=0.0))


@pytest.fixture(scope="session")
def star_assignment():
    return ElectrodeAssignment(input_a=2, input_b=3, ground=4, output=1)


@pytest.fixture(scope="session")
def divider_netlist():
    """0.06 V at node 2 through 1k into node 1; 2k and 3k from 1 to ground.

    Nodal analysis: V1 * (1/1k + 1/2k + 1/3k) = 0.06/1k, so V1 = 0.06 * 6/11.
    """
    return Netlist(
        node_count=3,
        elements=(
            Resistor(2, 1, 1000.0),
            Resistor(1, 0, 2000.0),
            Resistor(1, 0, 3000.0),
        ),
    )


@pytest.fixture(scope="session")
def small_colony():
    return generate_colony(ColonySpec(node_budget=30, seed=7))
