"""Command line entry point.

Subcommands: convert (raw trace -> normalized), run (single simulation),
sweep (parameter grid x repetitions), compare (router suite on a shared
workload), synth (regenerate the bundled fixtures).

Every engine and router parameter is a flag; `--config FILE` reads the same
names (underscored, one `key=value` per line) as baseline values, with
explicit flags taking precedence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import EngineConfig, EngineError, Simulation
from .experiments import (
    ExperimentConfig,
    ExperimentError,
    compare_routers,
    render_comparison,
    run_experiment,
)
from .ingest import (
    DEFAULT_GAP_THRESHOLD,
    IngestError,
    ProfileStore,
    TRACE_FORMATS,
    parse_profiles,
    parse_trace,
    serialize_trace,
)
from .metrics import export
from .routers import ROUTER_NAMES
from .routers.baselines import ProphetConfig
from .routers.pis import PisConfig
from .similarity import SimilarityParams
from .synth import write_fixtures


def _range_pair(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    if not hi:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return (float(lo), float(hi))


def _add_io_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file supplying flag defaults")
    p.add_argument("--trace", required=True, help="contact trace path")
    p.add_argument("--trace-format", choices=TRACE_FORMATS, default="normalized")
    p.add_argument(
        "--gap-threshold",
        type=float,
        default=DEFAULT_GAP_THRESHOLD,
        help="sighting gap (s) that still counts as one contact",
    )
    p.add_argument("--profiles", help="social profiles path")
    p.add_argument("--out", default="out", help="output directory")


def _add_engine_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("engine")
    g.add_argument("--duration", type=float, default=144_000.0)
    g.add_argument("--warmup", type=float, default=5_000.0)
    g.add_argument("--transmit-speed", type=float, default=250_000.0)
    g.add_argument("--message-interval", type=_range_pair, default=(500.0, 650.0))
    g.add_argument("--message-size", type=_range_pair, default=(500_000.0, 1_024_000.0))
    g.add_argument("--ttl", type=float, default=36_000.0)
    g.add_argument("--buffer-capacity", type=int, default=5_000_000)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--slot-duration", type=float, default=3600.0)
    g.add_argument("--slots-per-cycle", type=int, default=24)
    g.add_argument("--snapshot-interval", type=float, default=3600.0)


def _add_router_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("similarity and copy control")
    g.add_argument("--self-weight", type=float, default=0.5)
    g.add_argument("--slot-decay", type=float, default=0.8)
    g.add_argument("--lookback", type=int, default=6)
    g.add_argument("--weight-proximity", type=float, default=1 / 3)
    g.add_argument("--weight-interest", type=float, default=1 / 3)
    g.add_argument("--weight-social", type=float, default=1 / 3)
    g.add_argument("--squared-decay", action=argparse.BooleanOptionalAction, default=False)
    g.add_argument(
        "--include-direct-tie", action=argparse.BooleanOptionalAction, default=False
    )
    g.add_argument("--spray-margin", type=float, default=0.8)
    g.add_argument("--initial-copies", type=int, default=8)
    g.add_argument(
        "--fresh-peer-sim", action=argparse.BooleanOptionalAction, default=False
    )
    g.add_argument("--initial-value", type=int, default=1)
    g.add_argument("--incremental-value", type=int, default=1)
    b = p.add_argument_group("baseline routers")
    b.add_argument("--p-init", type=float, default=0.75)
    b.add_argument("--transitivity", type=float, default=0.25)
    b.add_argument("--aging-base", type=float, default=0.98)
    b.add_argument("--aging-unit", type=float, default=1.0)
    b.add_argument("--snw-copies", type=int, default=8)
    b.add_argument("--simbet-balance", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sansim",
        description="Trace-driven simulator for socially-aware opportunistic networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="convert a raw trace to the normalized format")
    c.add_argument("--from", dest="from_format", required=True, choices=TRACE_FORMATS)
    c.add_argument("--in", dest="in_path", required=True)
    c.add_argument("--out", dest="out_path", required=True)
    c.add_argument("--gap-threshold", type=float, default=DEFAULT_GAP_THRESHOLD)
    c.set_defaults(func=cmd_convert)

    r = sub.add_parser("run", help="single simulation run")
    _add_io_args(r)
    _add_engine_args(r)
    _add_router_args(r)
    r.add_argument("--router", choices=ROUTER_NAMES, default="pis")
    r.add_argument("--format", choices=("csv", "json", "both"), default="both")
    r.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="parameter grid x repetitions")
    _add_io_args(s)
    _add_engine_args(s)
    _add_router_args(s)
    s.add_argument("--router", choices=ROUTER_NAMES, default="pis")
    s.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="NAME=V1,V2,...",
        help="sweep axis; repeat for a grid",
    )
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("compare", help="router suite on one shared workload")
    _add_io_args(m)
    _add_engine_args(m)
    _add_router_args(m)
    m.add_argument(
        "--routers",
        default="pis,epidemic,prophet,simbet",
        help="comma-separated router list",
    )
    m.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    m.set_defaults(func=cmd_compare)

    y = sub.add_parser("synth", help="regenerate the bundled synthetic fixtures")
    y.add_argument("--out", default="fixtures")
    y.set_defaults(func=cmd_synth)
    return parser


def _inject_config_file(argv: list[str]) -> list[str]:
    """Expand --config FILE into flag tokens placed before the user's flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv  # let argparse report the missing value
    path = argv[i + 1]
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise IngestError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            tokens.append(flag if value.lower() == "true" else "--no-" + flag[2:])
        else:
            tokens += [flag, value]
    # insert right after the subcommand so explicit flags win
    return argv[:1] + tokens + argv[1:]


def _load_inputs(args):
    trace = parse_trace(args.trace, args.trace_format, args.gap_threshold)
    if args.profiles:
        profiles = parse_profiles(args.profiles, known_ids=range(trace.node_count))
    else:
        profiles = ProfileStore()
    return trace, profiles


def _engine_config(args) -> EngineConfig:
    size = args.message_size
    return EngineConfig(
        duration=args.duration,
        warmup=args.warmup,
        transmit_speed=args.transmit_speed,
        message_interval=args.message_interval,
        message_size=(int(size[0]), int(size[1])),
        ttl=args.ttl,
        buffer_capacity=args.buffer_capacity,
        rng_seed=args.seed,
        slot_duration=args.slot_duration,
        slots_per_cycle=args.slots_per_cycle,
        snapshot_interval=args.snapshot_interval,
    )


def _experiment_config(args, trace, profiles) -> ExperimentConfig:
    params = SimilarityParams(
        self_weight=args.self_weight,
        slot_decay=args.slot_decay,
        lookback=args.lookback,
        weight_proximity=args.weight_proximity,
        weight_interest=args.weight_interest,
        weight_social=args.weight_social,
        squared_decay=args.squared_decay,
        include_direct_tie=args.include_direct_tie,
    )
    return ExperimentConfig(
        trace=trace,
        profiles=profiles,
        router=getattr(args, "router", "pis"),
        engine=_engine_config(args),
        pis=PisConfig(
            params=params,
            spray_margin=args.spray_margin,
            initial_copies=args.initial_copies,
            fresh_peer_sim=args.fresh_peer_sim,
            initial_value=args.initial_value,
            incremental_value=args.incremental_value,
        ),
        prophet=ProphetConfig(
            p_init=args.p_init,
            transitivity=args.transitivity,
            aging_base=args.aging_base,
            aging_unit=args.aging_unit,
        ),
        snw_copies=args.snw_copies,
        simbet_balance=args.simbet_balance,
        outdir=Path(args.out),
    )


def cmd_convert(args) -> int:
    trace = parse_trace(args.in_path, args.from_format, args.gap_threshold)
    Path(args.out_path).write_text(serialize_trace(trace), encoding="utf-8")
    print(f"wrote {args.out_path}: {trace.node_count} nodes, {len(trace.events)} events")
    return 0


def cmd_run(args) -> int:
    trace, profiles = _load_inputs(args)
    config = _experiment_config(args, trace, profiles)
    sim = Simulation(trace, profiles, config.build_router(), config.engine)
    report = sim.run()
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("csv", "both"):
        export(report, outdir / "report.csv", "csv")
        written.append(outdir / "report.csv")
    if args.format in ("json", "both"):
        export(report, outdir / "report.json", "json")
        written.append(outdir / "report.json")
    if args.figures:
        from .plots import timeseries_figure

        written.append(timeseries_figure(report, outdir / "report.png"))
    f = report.final
    print(
        f"{args.router}: created={f.created} delivered={f.delivered} "
        f"delivery_ratio={f.delivery_ratio:.4f} overhead_ratio={f.overhead_ratio:.2f}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _parse_sweep_axes(param_args: list[str]) -> dict[str, list]:
    sweep = {}
    for axis in param_args:
        name, _, values = axis.partition("=")
        if not values:
            raise ExperimentError(f"--param expects NAME=V1,V2,..., got {axis!r}")
        sweep[name.strip()] = [v for v in values.split(",") if v]
    return sweep


def cmd_sweep(args) -> int:
    trace, profiles = _load_inputs(args)
    config = _experiment_config(args, trace, profiles)
    config.sweep = _parse_sweep_axes(args.param)
    config.repetitions = args.reps
    written = run_experiment(config)
    if args.figures and len(config.sweep) == 1:
        from .plots import sweep_figure

        # re-read the aggregate rather than re-running: cheap and keeps the
        # figure in lockstep with the shipped data
        rows = _read_aggregate_rows(written[-1])
        (param_name,) = config.sweep.keys()
        written.append(
            sweep_figure(param_name, rows, Path(args.out) / f"sweep_{param_name}.png")
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def _read_aggregate_rows(path: Path) -> list[tuple]:
    import csv as _csv

    rows = []
    with open(path, encoding="utf-8") as fh:
        reader = _csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        for cells in reader:
            means = {
                "delivery_ratio": float(cells[header.index("delivery_ratio")]),
                "overhead_ratio": float(cells[header.index("overhead_ratio")]),
                "avg_latency": float(cells[header.index("avg_latency_s")]),
                "avg_hop_count": float(cells[header.index("avg_hop_count")]),
            }
            try:
                value = float(cells[0])
            except ValueError:
                value = cells[0]
            rows.append((value, means))
    return rows


def cmd_compare(args) -> int:
    trace, profiles = _load_inputs(args)
    config = _experiment_config(args, trace, profiles)
    routers = [r.strip() for r in args.routers.split(",") if r.strip()]
    for r in routers:
        if r not in ROUTER_NAMES:
            raise ExperimentError(f"unknown router {r!r}; choices: {ROUTER_NAMES}")
    reports = compare_routers(config, routers)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    table = outdir / "comparison.csv"
    table.write_text(render_comparison(reports, config.engine.rng_seed), encoding="utf-8")
    written = [table]
    for name, report in reports.items():
        p = outdir / f"report_{name}.csv"
        export(report, p, "csv")
        written.append(p)
    if args.figures:
        from .plots import comparison_figure

        written.append(comparison_figure(reports, outdir / "comparison.png"))
    for name, report in reports.items():
        f = report.final
        print(
            f"{name:9s} delivery_ratio={f.delivery_ratio:.4f} "
            f"overhead_ratio={f.overhead_ratio:.2f} avg_latency_s={f.avg_latency:.1f} "
            f"avg_hop_count={f.avg_hop_count:.2f}"
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_synth(args) -> int:
    for path in write_fixtures(args.out):
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _inject_config_file(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (IngestError, EngineError, ExperimentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
