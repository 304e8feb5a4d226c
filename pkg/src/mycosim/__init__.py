"""mycosim: fungal-electronics simulation and analysis toolkit.

Turns spatial mycelium-like graphs into RC or memristive circuit
networks, runs transient simulations under pulsed stimulation, mines
Boolean gates over threshold sweeps, models memristor hysteresis, and
analyzes spike activity in slow electrical recordings.
"""

from .circuit import (
    Capacitor,
    MemristorElement,
    Netlist,
    PulseSource,
    RcParams,
    Resistor,
    Topology,
    build_rc_network,
    export_netlist_text,
    netlist_from_json,
    netlist_to_json,
    swap_ground,
)
from .errors import (
    GateMinerError,
    GraphError,
    MemristorError,
    MycosimError,
    NetlistError,
    RecordingError,
    SolverError,
)
from .gates import (
    ElectrodeAssignment,
    GateClass,
    GateHistogram,
    TruthTableOutcome,
    classify,
    default_thresholds,
    group_of,
    measure_truth_table,
    mine,
    trend_summary,
)
from .graph import (
    ColonySpec,
    SpatialGraph,
    connected_components,
    dump_graph,
    generate_colony,
    largest_component,
    load_graph,
    make_graph,
)
from .memristor import (
    IVCurve,
    LoopMetrics,
    MemristorModel,
    cv_sweep,
    loop_metrics,
    step_state,
    triangle_drive,
)
from .solver import (
    IntegrationMethod,
    TransientConfig,
    TransientResult,
    dc_operating_point,
    simulate,
)
from .spikes import (
    BaselineShift,
    BellEvent,
    Polarity,
    Recording,
    Spike,
    SpikeStats,
    StepEvent,
    Train,
    TrainClass,
    TrainEvent,
    Unit,
    classify_train,
    compare_stimulus_responses,
    detect_baseline_shift,
    detect_spikes,
    group_trains,
    load_recording,
    spike_stats,
    synthesize_recording,
)
from .waveform import PulseSpec

__version__ = "0.1.0"

__all__ = [
    "BaselineShift",
    "BellEvent",
    "Capacitor",
    "ColonySpec",
    "ElectrodeAssignment",
    "GateClass",
    "GateHistogram",
    "GateMinerError",
    "GraphError",
    "IVCurve",
    "IntegrationMethod",
    "LoopMetrics",
    "MemristorElement",
    "MemristorError",
    "MemristorModel",
    "MycosimError",
    "Netlist",
    "NetlistError",
    "Polarity",
    "PulseSource",
    "PulseSpec",
    "RcParams",
    "Recording",
    "RecordingError",
    "Resistor",
    "SolverError",
    "SpatialGraph",
    "Spike",
    "SpikeStats",
    "StepEvent",
    "Topology",
    "Train",
    "TrainClass",
    "TrainEvent",
    "TransientConfig",
    "TransientResult",
    "TruthTableOutcome",
    "Unit",
    "build_rc_network",
    "classify",
    "classify_train",
    "compare_stimulus_responses",
    "connected_components",
    "cv_sweep",
    "dc_operating_point",
    "default_thresholds",
    "detect_baseline_shift",
    "detect_spikes",
    "dump_graph",
    "export_netlist_text",
    "generate_colony",
    "group_of",
    "group_trains",
    "largest_component",
    "load_graph",
    "load_recording",
    "loop_metrics",
    "make_graph",
    "measure_truth_table",
    "mine",
    "netlist_from_json",
    "netlist_to_json",
    "simulate",
    "spike_stats",
    "step_state",
    "swap_ground",
    "synthesize_recording",
    "trend_summary",
    "triangle_drive",
    "__version__",
]
