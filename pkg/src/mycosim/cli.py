"""Command-line surface for the simulation and analysis pipeline.

Every subcommand reads its inputs, writes one primary artifact plus a
``<out>.meta.json`` sidecar recording tool version, seed and the full
resolved parameter set, and exits 0. Validation problems exit 2 with a
message on stderr prefixed by the failing subsystem. Outputs are
written to a temporary file and renamed, so a crash never leaves a
partial artifact behind. A ``--config file.json`` may supply any option
by its flag name; explicit flags win over the config file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .circuit import (
    RcParams,
    Topology,
    build_rc_network,
    export_netlist_text,
    netlist_from_json,
    netlist_to_json,
)
from .errors import MycosimError
from .gates import mine, trend_summary
from .graph import ColonySpec, dump_graph, generate_colony, load_graph
from .memristor import MemristorModel, cv_sweep, loop_metrics
from .solver import IntegrationMethod, TransientConfig, simulate
from .spikes import (
    BellEvent,
    StepEvent,
    TrainEvent,
    Unit,
    classify_train,
    detect_baseline_shift,
    detect_spikes,
    group_trains,
    load_recording,
    spike_stats,
    synthesize_recording,
)
from .waveform import PulseSpec


class CliError(MycosimError):
    subsystem = "cli"


@dataclass(frozen=True)
class _Opt:
    flag: str
    type: Callable
    default: object = None
    required: bool = False
    repeat: bool = False
    choices: tuple[str, ...] | None = None
    help: str = ""

    @property
    def dest(self) -> str:
        return self.flag.replace("-", "_")


_PULSE_OPTS = (
    _Opt("amplitude", float, 0.06, help="pulse amplitude, volts"),
    _Opt("delay", float, 1e-6, help="pulse delay, seconds"),
    _Opt("rise", float, 1e-7, help="pulse rise time, seconds"),
    _Opt("fall", float, 1e-7, help="pulse fall time, seconds"),
    _Opt("pulse-width", float, 5e-5, help="pulse plateau width, seconds"),
    _Opt("period", float, 0.0, help="pulse period, 0 for one-shot"),
)

_RC_OPTS = (
    _Opt("topology", str, "parallel", choices=("parallel", "serial"),
         help="edge element arrangement"),
    _Opt("r-per-length", float, 10.0, help="ohms per length unit"),
    _Opt("c-per-length", float, 1e-14, help="farads per length unit"),
    _Opt("gmin", float, 1e-12, help="leak conductance to ground, siemens"),
)

_OUT = _Opt("out", str, required=True, help="output file path")


def _pulse_from(v: dict) -> PulseSpec:
    return PulseSpec(
        amplitude=v["amplitude"],
        delay=v["delay"],
        rise=v["rise"],
        fall=v["fall"],
        width=v["pulse_width"],
        period=v["period"],
    )


def _rc_params_from(v: dict) -> RcParams:
    return RcParams(
        topology=Topology(v["topology"]),
        resistance_per_length=v["r_per_length"],
        capacitance_per_length=v["c_per_length"],
        gmin=v["gmin"],
    )


def _read_text(path: str) -> str:
    return Path(path).read_text()


def _read_json(path: str) -> dict:
    data = json.loads(_read_text(path))
    if not isinstance(data, dict):
        raise CliError(f"{path}: expected a JSON object at the top level")
    return data


def _cmd_gen_graph(v: dict):
    spec = ColonySpec(
        node_budget=v["nodes"],
        branching_probability=v["branching"],
        anastomosis_probability=v["anastomosis"],
        step_length_mean=v["step_length"],
        step_length_jitter=v["jitter"],
        seed=v["seed"],
    )
    graph = generate_colony(spec)
    extra = {"result": {"nodes": graph.node_count, "edges": graph.edge_count,
                        "mean_degree": graph.mean_degree()}}
    return dump_graph(graph), extra


def _cmd_build_netlist(v: dict):
    graph = load_graph(_read_text(v["graph"]))
    netlist = build_rc_network(graph, _rc_params_from(v))
    text = json.dumps(netlist_to_json(netlist), indent=2, sort_keys=True) + "\n"
    extra = {"result": {"node_count": netlist.node_count,
                        "elements": len(netlist.elements)}}
    return text, extra


def _tran_config(v: dict, method: str | None = None) -> TransientConfig | None:
    t_stop, dt = v.get("t_stop"), v.get("dt")
    if t_stop is None and dt is None:
        return None
    if t_stop is None or dt is None:
        raise CliError("--t-stop and --dt must be given together")
    kwargs = {"t_stop": t_stop, "dt": dt}
    if method is not None:
        kwargs["method"] = IntegrationMethod(method)
    return TransientConfig(**kwargs)


def _cmd_export_spice(v: dict):
    netlist = netlist_from_json(_read_json(v["netlist"]))
    pulse = _pulse_from(v)
    stimulus = [(node, pulse) for node in (v["drive"] or [])]
    return export_netlist_text(netlist, stimulus, _tran_config(v)), {}


def _cmd_simulate(v: dict):
    netlist = netlist_from_json(_read_json(v["netlist"]))
    pulse = _pulse_from(v)
    sources = [(node, pulse) for node in (v["drive"] or [])]
    config = TransientConfig(
        t_stop=v["t_stop"], dt=v["dt"], method=IntegrationMethod(v["method"])
    )
    result = simulate(netlist, sources, config)
    return result.to_csv(v["probe"]), {}


def _cmd_cv_sweep(v: dict):
    model = MemristorModel(
        r_on=v["r_on"],
        r_off=v["r_off"],
        w=v["w0"],
        mobility=v["mobility"],
        window_p=v["window_p"],
    )
    curve = cv_sweep(
        model,
        v_peak=v["v_peak"],
        sweep_rate=v["rate"],
        cycles=v["cycles"],
        steps_per_cycle=v["steps_per_cycle"],
    )
    metrics = loop_metrics(curve)
    extra = {"result": {"pinch_current": metrics.pinch_current,
                        "lobe_area": metrics.lobe_area}}
    return curve.to_csv(), extra


def _cmd_mine_gates(v: dict):
    graph = load_graph(_read_text(v["graph"]))
    config = TransientConfig(
        t_stop=v["t_stop"], dt=v["dt"],
        method=IntegrationMethod.BACKWARD_EULER,
    )
    hist = mine(
        graph,
        _rc_params_from(v),
        trials=v["trials"],
        seed=v["seed"],
        pulse=_pulse_from(v),
        config=config,
        jobs=v["jobs"],
    )
    extra = {"result": {"metadata": hist.metadata, "trend": trend_summary(hist)}}
    return hist.to_csv(), extra


def _spike_dict(spike) -> dict:
    return {
        "onset_index": spike.onset_index,
        "peak_index": spike.peak_index,
        "end_index": spike.end_index,
        "amplitude": spike.amplitude,
        "width": spike.width,
        "polarity": spike.polarity.value,
        "peak_time": spike.peak_time,
    }


def _cmd_analyze_spikes(v: dict):
    unit = Unit(v["unit"])
    rec = load_recording(_read_text(v["recording"]), unit)
    spikes = detect_spikes(
        rec,
        baseline_window=v["baseline_window"],
        threshold=v["threshold"],
        min_width=v["min_width"],
    )
    payload: dict = {
        "unit": unit.value,
        "sample_interval": rec.sample_interval,
        "spike_count": len(spikes),
        "spikes": [_spike_dict(s) for s in spikes],
        "stats": dataclasses.asdict(spike_stats(spikes)),
    }
    if v["max_gap"] is not None:
        trains = group_trains(spikes, v["max_gap"])
        payload["trains"] = [
            {
                "size": len(t.spikes),
                "mean_width": t.mean_width,
                "mean_amplitude": t.mean_amplitude,
                "mean_inter_spike_interval": t.mean_inter_spike_interval,
                "classification": (
                    classify_train(t).value if unit is Unit.KILOOHMS else None
                ),
            }
            for t in trains
        ]
    if v["min_shift"] is not None:
        shifts = detect_baseline_shift(
            rec, v["min_shift"], settle_fraction=v["settle_fraction"]
        )
        payload["baseline_shifts"] = [
            {
                "start": s.start,
                "shift_amplitude": s.shift_amplitude,
                "saturation_time": s.saturation_time,
                "relaxation_time": (
                    None if math.isnan(s.relaxation_time) else s.relaxation_time
                ),
            }
            for s in shifts
        ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n", {}


_EVENT_KINDS = {
    "bell": (BellEvent, ("time", "amplitude", "fwhm"), ()),
    "step": (StepEvent, ("time", "amplitude", "tau"), ("release_time",)),
    "train": (TrainEvent, ("start", "count", "period", "amplitude", "fwhm"), ()),
}

EVENTS_FORMAT = "mycosim-events v1"


def _parse_events(doc: dict, path: str) -> list:
    unknown = set(doc) - {"format", "events"}
    if unknown:
        raise CliError(f"{path}: unknown keys {sorted(unknown)}")
    if doc.get("format") != EVENTS_FORMAT:
        raise CliError(f"{path}: expected format tag {EVENTS_FORMAT!r}")
    raw_events = doc.get("events")
    if not isinstance(raw_events, list):
        raise CliError(f"{path}: 'events' must be a list")
    events = []
    for i, entry in enumerate(raw_events):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise CliError(f"{path}: event {i} needs a 'kind'")
        kind = entry["kind"]
        if kind not in _EVENT_KINDS:
            raise CliError(f"{path}: event {i} has unknown kind {kind!r}")
        cls, required, optional = _EVENT_KINDS[kind]
        extra = set(entry) - {"kind"} - set(required) - set(optional)
        if extra:
            raise CliError(f"{path}: event {i} has unknown keys {sorted(extra)}")
        missing = set(required) - set(entry)
        if missing:
            raise CliError(f"{path}: event {i} is missing {sorted(missing)}")
        kwargs = {k: entry[k] for k in entry if k != "kind"}
        events.append(cls(**kwargs))
    return events


def _cmd_synth_signal(v: dict):
    events = _parse_events(_read_json(v["events"]), v["events"])
    rec = synthesize_recording(
        events,
        duration=v["duration"],
        sample_interval=v["sample_interval"],
        noise_sd=v["noise_sd"],
        seed=v["seed"],
        unit=Unit(v["unit"]),
    )
    return rec.to_csv(), {}


_COMMANDS: dict[str, tuple[tuple[_Opt, ...], Callable, str]] = {
    "gen-graph": (
        (
            _Opt("nodes", int, 200, help="node budget"),
            _Opt("branching", float, 0.3, help="per-step tip branching probability"),
            _Opt("anastomosis", float, 0.1, help="per-step tip fusion probability"),
            _Opt("step-length", float, 100.0, help="mean growth step length"),
            _Opt("jitter", float, 0.25, help="relative step length spread"),
            _Opt("seed", int, 0, help="generator seed"),
            _OUT,
        ),
        _cmd_gen_graph,
        "grow a random colony graph and write it as text",
    ),
    "build-netlist": (
        (
            _Opt("graph", str, required=True, help="input graph file"),
            *_RC_OPTS,
            _OUT,
        ),
        _cmd_build_netlist,
        "convert a graph file to an RC netlist (JSON)",
    ),
    "export-spice": (
        (
            _Opt("netlist", str, required=True, help="input netlist JSON"),
            _Opt("drive", int, repeat=True, help="node to attach a pulse source to"),
            *_PULSE_OPTS,
            _Opt("t-stop", float, help="transient length for the .tran line"),
            _Opt("dt", float, help="time step for the .tran line"),
            _OUT,
        ),
        _cmd_export_spice,
        "render a netlist in conventional simulator syntax",
    ),
    "simulate": (
        (
            _Opt("netlist", str, required=True, help="input netlist JSON"),
            _Opt("drive", int, repeat=True, help="node to attach a pulse source to"),
            *_PULSE_OPTS,
            _Opt("t-stop", float, 2e-4, help="transient length, seconds"),
            _Opt("dt", float, 5e-8, help="time step, seconds"),
            _Opt("method", str, "trapezoidal",
                 choices=("trapezoidal", "backward-euler"),
                 help="integration method"),
            _Opt("probe", int, repeat=True, help="node to record (default: all)"),
            _OUT,
        ),
        _cmd_simulate,
        "run a transient simulation, write node voltages as CSV",
    ),
    "cv-sweep": (
        (
            _Opt("r-on", float, 1e3, help="fully-on resistance, ohms"),
            _Opt("r-off", float, 1e4, help="fully-off resistance, ohms"),
            _Opt("w0", float, 0.1, help="initial state in [0, 1]"),
            _Opt("mobility", float, 2.4e4, help="state change per coulomb"),
            _Opt("window-p", int, 1, help="window function exponent"),
            _Opt("v-peak", float, 0.5, help="triangle peak voltage"),
            _Opt("rate", float, 1.0, help="sweep rate, volts per second"),
            _Opt("cycles", int, 1, help="number of triangle cycles"),
            _Opt("steps-per-cycle", int, 2000, help="samples per cycle"),
            _OUT,
        ),
        _cmd_cv_sweep,
        "drive a memristor with a triangle sweep, write the I-V curve",
    ),
    "mine-gates": (
        (
            _Opt("graph", str, required=True, help="input graph file"),
            *_RC_OPTS,
            _Opt("trials", int, 1000, help="electrode placements to try"),
            _Opt("seed", int, 0, help="ensemble seed"),
            _Opt("jobs", int, 1, help="parallel worker processes"),
            *_PULSE_OPTS,
            _Opt("t-stop", float, 2e-4, help="transient length per pattern"),
            _Opt("dt", float, 5e-8, help="time step, seconds"),
            _OUT,
        ),
        _cmd_mine_gates,
        "mine Boolean gates over the threshold sweep, write the histogram CSV",
    ),
    "analyze-spikes": (
        (
            _Opt("recording", str, required=True, help="input recording CSV"),
            _Opt("unit", str, "millivolts", choices=("millivolts", "kiloohms"),
                 help="recording units"),
            _Opt("baseline-window", float, required=True,
                 help="running-median window, seconds"),
            _Opt("threshold", float, required=True,
                 help="detection threshold, recording units"),
            _Opt("min-width", float, required=True,
                 help="minimum spike width, seconds"),
            _Opt("max-gap", float, help="group trains with this max peak gap"),
            _Opt("min-shift", float, help="also detect baseline shifts >= this"),
            _Opt("settle-fraction", float, 0.95,
                 help="plateau fraction defining saturation"),
            _OUT,
        ),
        _cmd_analyze_spikes,
        "detect spikes (optionally trains and baseline shifts), write JSON",
    ),
    "synth-signal": (
        (
            _Opt("events", str, required=True, help="event spec JSON file"),
            _Opt("duration", float, required=True, help="recording length, seconds"),
            _Opt("sample-interval", float, required=True,
                 help="sample spacing, seconds"),
            _Opt("noise-sd", float, 0.0, help="gaussian noise sd"),
            _Opt("seed", int, 0, help="noise seed"),
            _Opt("unit", str, "millivolts", choices=("millivolts", "kiloohms"),
                 help="recording units"),
            _OUT,
        ),
        _cmd_synth_signal,
        "synthesize a ground-truth recording from primitive events",
    ),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mycosim",
        description="simulate and analyze fungal electronic networks",
    )
    parser.add_argument(
        "--version", action="version", version=f"mycosim {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, (opts, _, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", default=None,
                       help="JSON file of option values; explicit flags win")
        for opt in opts:
            kwargs: dict = {"dest": opt.dest, "default": None, "help": opt.help}
            if opt.repeat:
                kwargs["action"] = "append"
            if opt.choices:
                kwargs["choices"] = opt.choices
            p.add_argument(f"--{opt.flag}", type=opt.type, **kwargs)
    return parser


def _resolve(opts: Sequence[_Opt], args: argparse.Namespace) -> dict:
    config: dict = {}
    if args.config is not None:
        config = _read_json(args.config)
        known = {o.flag for o in opts}
        unknown = set(config) - known
        if unknown:
            raise CliError(
                f"unknown config keys for this subcommand: {sorted(unknown)}"
            )
    values: dict = {}
    for opt in opts:
        value = getattr(args, opt.dest)
        if value is None and opt.flag in config:
            raw = config[opt.flag]
            if opt.repeat:
                raw = raw if isinstance(raw, list) else [raw]
                value = [opt.type(x) for x in raw]
            else:
                value = opt.type(raw)
        if value is None:
            value = opt.default
        if opt.required and value is None:
            raise CliError(f"missing required option --{opt.flag}")
        if opt.choices and value is not None and value not in opt.choices:
            raise CliError(f"--{opt.flag} must be one of {opt.choices}, got {value!r}")
        values[opt.dest] = value
    return values


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    if str(target.parent) not in ("", "."):
        target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(f".{target.name}.tmp{os.getpid()}")
    try:
        tmp.write_text(text)
        os.replace(tmp, target)
    finally:
        if tmp.exists():
            tmp.unlink()


def _run(argv: Sequence[str] | None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    opts, handler, _ = _COMMANDS[args.subcommand]
    values = _resolve(opts, args)
    text, extra = handler(values)
    meta = {
        "tool": "mycosim",
        "version": __version__,
        "subcommand": args.subcommand,
        "seed": values.get("seed"),
        "parameters": values,
    }
    meta.update(extra)
    _atomic_write(values["out"], text)
    _atomic_write(
        values["out"] + ".meta.json",
        json.dumps(meta, indent=2, sort_keys=True) + "\n",
    )
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return _run(argv)
    except MycosimError as exc:
        print(f"{exc.subsystem}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"cli: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"cli: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except (TypeError, ValueError) as exc:
        print(f"cli: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
