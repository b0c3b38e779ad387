"""Experiment orchestration: single runs, parameter sweeps, router suites.

Every run's seed derives from (master seed, grid point, repetition index)
through sha256, so any run can be reproduced in isolation.  Routers under a
comparison share the master seed and therefore the exact generated workload.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .engine import EngineConfig, Simulation
from .ingest import NormalizedTrace, ProfileStore
from .metrics import MetricsReport, render_csv, render_json
from .routers import make_router
from .routers.baselines import ProphetConfig
from .routers.pis import PisConfig
from .similarity import SimilarityParams


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    trace: NormalizedTrace
    profiles: ProfileStore
    router: str = "pis"
    engine: EngineConfig = field(default_factory=EngineConfig)
    pis: PisConfig = field(default_factory=PisConfig)
    prophet: ProphetConfig = field(default_factory=ProphetConfig)
    snw_copies: int = 8
    simbet_balance: float = 0.5
    sweep: dict[str, list] = field(default_factory=dict)
    repetitions: int = 1
    outdir: Path = Path("out")

    def build_router(self, name: Optional[str] = None):
        return make_router(
            name or self.router,
            pis_config=self.pis,
            prophet_config=self.prophet,
            snw_copies=self.snw_copies,
            simbet_balance=self.simbet_balance,
        )


# sweepable parameter -> (owner, caster); owners: engine / pis / similarity
_RANGE = "range"
SWEEPABLE = {
    "duration": ("engine", float),
    "warmup": ("engine", float),
    "transmit_speed": ("engine", float),
    "message_interval": ("engine", _RANGE),
    "message_size": ("engine", _RANGE),
    "ttl": ("engine", float),
    "buffer_capacity": ("engine", int),
    "slot_duration": ("engine", float),
    "slots_per_cycle": ("engine", int),
    "snapshot_interval": ("engine", float),
    "spray_margin": ("pis", float),
    "initial_copies": ("pis", int),
    "fresh_peer_sim": ("pis", bool),
    "initial_value": ("pis", int),
    "incremental_value": ("pis", int),
    "self_weight": ("similarity", float),
    "slot_decay": ("similarity", float),
    "lookback": ("similarity", int),
    "weight_proximity": ("similarity", float),
    "weight_interest": ("similarity", float),
    "weight_social": ("similarity", float),
    "squared_decay": ("similarity", bool),
    "include_direct_tie": ("similarity", bool),
}


def cast_sweep_value(name: str, raw):
    """Coerce a raw (often string) sweep value to the parameter's type."""
    if name not in SWEEPABLE:
        raise ExperimentError(
            f"unknown sweep parameter {name!r}; choices: {sorted(SWEEPABLE)}"
        )
    _, caster = SWEEPABLE[name]
    if caster is _RANGE:
        if isinstance(raw, (tuple, list)):
            lo, hi = raw
        else:
            lo, _, hi = str(raw).partition(":")
            if not hi:
                hi = lo
        return (float(lo), float(hi))
    if caster is bool:
        if isinstance(raw, bool):
            return raw
        return str(raw).lower() in ("1", "true", "yes", "on")
    return caster(raw)


def _apply_point(config: ExperimentConfig, point: dict) -> ExperimentConfig:
    engine_kw, pis_kw, sim_kw = {}, {}, {}
    for name, value in point.items():
        owner, _ = SWEEPABLE[name]
        if owner == "engine":
            engine_kw[name] = value
        elif owner == "pis":
            pis_kw[name] = value
        else:
            sim_kw[name] = value
    engine = replace(config.engine, **engine_kw) if engine_kw else config.engine
    params = replace(config.pis.params, **sim_kw) if sim_kw else config.pis.params
    pis = replace(config.pis, params=params, **pis_kw) if (pis_kw or sim_kw) else config.pis
    clone = ExperimentConfig(
        trace=config.trace,
        profiles=config.profiles,
        router=config.router,
        engine=engine,
        pis=pis,
        prophet=config.prophet,
        snw_copies=config.snw_copies,
        simbet_balance=config.simbet_balance,
        sweep=config.sweep,
        repetitions=config.repetitions,
        outdir=config.outdir,
    )
    return clone


def derive_seed(master: int, point: dict, rep: int) -> int:
    """Stable per-run seed from the master seed, grid point, and repetition."""
    blob = json.dumps([master, sorted(point.items()), rep], sort_keys=True)
    return int.from_bytes(hashlib.sha256(blob.encode()).digest()[:8], "big")


def _point_slug(point: dict, rep: Optional[int] = None) -> str:
    parts = []
    for k in sorted(point):
        v = point[k]
        if isinstance(v, (tuple, list)):
            v = ":".join(_num(x) for x in v)
        parts.append(f"{k}={v}")
    slug = "_".join(parts) if parts else "base"
    if rep is not None:
        slug += f"_rep{rep:02d}"
    return slug


def _num(x) -> str:
    if isinstance(x, float):
        return "%.10g" % x
    return str(x)


def _grid(sweep: dict[str, list]) -> list[dict]:
    points = [{}]
    for name in sorted(sweep):
        values = [cast_sweep_value(name, v) for v in sweep[name]]
        points = [dict(p, **{name: v}) for p in points for v in values]
    return points


def _single_run(config: ExperimentConfig, router_name: str, seed: int) -> MetricsReport:
    engine = replace(config.engine, rng_seed=seed)
    sim = Simulation(config.trace, config.profiles, config.build_router(router_name), engine)
    return sim.run()


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Execute repetitions x sweep grid; returns the files written."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    master = config.engine.rng_seed
    written = []
    agg_rows = []
    param_names = sorted(config.sweep)
    for point in _grid(config.sweep):
        finals = []
        for rep in range(config.repetitions):
            seed = derive_seed(master, point, rep) if config.sweep or config.repetitions > 1 else master
            try:
                report = _single_run(_apply_point(config, point), config.router, seed)
            except Exception as exc:
                raise ExperimentError(
                    f"run failed at point {_point_slug(point)} rep {rep}: {exc}"
                ) from exc
            # slugs may contain dots (float grid values), so extensions are
            # appended rather than via with_suffix, which would eat the slug
            base = f"run_{config.router}_{_point_slug(point, rep)}"
            csv_path = outdir / f"{base}.csv"
            json_path = outdir / f"{base}.json"
            csv_path.write_text(render_csv(report), encoding="utf-8")
            json_path.write_text(render_json(report), encoding="utf-8")
            written += [csv_path, json_path]
            finals.append(report.final)
        agg_rows.append((point, _mean_metrics(finals)))
    agg_path = outdir / f"aggregate_{config.router}.csv"
    agg_path.write_text(
        _render_aggregate(param_names, agg_rows, config, master), encoding="utf-8"
    )
    written.append(agg_path)
    return written


_METRIC_FIELDS = (
    "delivery_ratio",
    "overhead_ratio",
    "avg_latency",
    "avg_hop_count",
    "created",
    "delivered",
    "relays",
)


def _mean_metrics(finals: Sequence) -> dict:
    n = len(finals)
    out = {"reps": n}
    for f_name in _METRIC_FIELDS:
        out[f_name] = sum(getattr(s, f_name) for s in finals) / n
    return out


_AGG_METRIC_COLUMNS = (
    "reps",
    "delivery_ratio",
    "overhead_ratio",
    "avg_latency_s",
    "avg_hop_count",
    "created",
    "delivered",
    "relays",
)


def _render_aggregate(
    param_names: list[str], rows, config: ExperimentConfig, master: int
) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(param_names) + list(_AGG_METRIC_COLUMNS))
    for point, means in rows:
        cells = []
        for name in param_names:
            v = point[name]
            cells.append(":".join(_num(x) for x in v) if isinstance(v, tuple) else _num(v))
        cells += [
            str(means["reps"]),
            _num(means["delivery_ratio"]),
            _num(means["overhead_ratio"]),
            _num(means["avg_latency"]),
            _num(means["avg_hop_count"]),
            _num(means["created"]),
            _num(means["delivered"]),
            _num(means["relays"]),
        ]
        w.writerow(cells)
    echo = config.engine.as_dict()
    echo["router"] = config.router
    buf.write("# config %s\n" % json.dumps(echo, sort_keys=True))
    buf.write("# master_seed %d\n" % master)
    return buf.getvalue()


def compare_routers(
    config: ExperimentConfig, routers: Sequence[str]
) -> dict[str, MetricsReport]:
    """Run each router on the identical workload; reports keyed by router."""
    reports = {}
    for name in routers:
        try:
            reports[name] = _single_run(config, name, config.engine.rng_seed)
        except Exception as exc:
            raise ExperimentError(f"run failed for router {name!r}: {exc}") from exc
    return reports


def render_comparison(reports: dict[str, MetricsReport], seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["router"] + list(_AGG_METRIC_COLUMNS[1:]))
    for name, report in reports.items():
        f = report.final
        w.writerow(
            [
                name,
                _num(f.delivery_ratio),
                _num(f.overhead_ratio),
                _num(f.avg_latency),
                _num(f.avg_hop_count),
                str(f.created),
                str(f.delivered),
                str(f.relays),
            ]
        )
    configs = {name: rep.config for name, rep in reports.items()}
    buf.write("# config %s\n" % json.dumps(configs, sort_keys=True))
    buf.write("# seed %d\n" % seed)
    return buf.getvalue()
