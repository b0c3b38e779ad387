import csv
import json

import pytest

from sansim.engine import EngineConfig
from sansim.experiments import (
    ExperimentConfig,
    ExperimentError,
    SWEEPABLE,
    cast_sweep_value,
    compare_routers,
    derive_seed,
    render_comparison,
    run_experiment,
    _grid,
    _point_slug,
)


def small_config(ten_node, tmp_path, **kw):
    trace, profiles = ten_node
    return ExperimentConfig(
        trace=trace,
        profiles=profiles,
        engine=EngineConfig(duration=20_000.0, rng_seed=11),
        outdir=tmp_path,
        **kw,
    )


class TestSeedDerivation:
    def test_depends_on_every_ingredient(self):
        base = derive_seed(1, {"lookback": 3}, 0)
        assert derive_seed(2, {"lookback": 3}, 0) != base
        assert derive_seed(1, {"lookback": 4}, 0) != base
        assert derive_seed(1, {"lookback": 3}, 1) != base

    def test_stable_across_processes(self):
        # sha256-based, not hash()-based: must never vary with PYTHONHASHSEED
        assert derive_seed(1, {"lookback": 3}, 0) == 14931925465253856568

    def test_point_order_is_irrelevant(self):
        a = derive_seed(9, {"a": 1, "b": 2}, 0)
        b = derive_seed(9, {"b": 2, "a": 1}, 0)
        assert a == b


class TestSweepValues:
    def test_casting(self):
        assert cast_sweep_value("lookback", "3") == 3
        assert cast_sweep_value("spray_margin", "0.4") == 0.4
        assert cast_sweep_value("fresh_peer_sim", "true") is True
        assert cast_sweep_value("fresh_peer_sim", "0") is False
        assert cast_sweep_value("message_interval", "100:200") == (100.0, 200.0)
        assert cast_sweep_value("message_size", (1, 2)) == (1.0, 2.0)

    def test_unknown_parameter(self):
        with pytest.raises(ExperimentError, match="unknown sweep parameter"):
            cast_sweep_value("nof_copy", "8")

    def test_every_registered_name_is_spellable(self):
        for name, (owner, _) in SWEEPABLE.items():
            assert owner in ("engine", "pis", "similarity"), name

    def test_grid_is_a_sorted_cartesian_product(self):
        grid = _grid({"lookback": ["1", "3"], "spray_margin": ["0.2"]})
        assert grid == [
            {"lookback": 1, "spray_margin": 0.2},
            {"lookback": 3, "spray_margin": 0.2},
        ]

    def test_slugs(self):
        assert _point_slug({}) == "base"
        assert _point_slug({"lookback": 3}, rep=2) == "lookback=3_rep02"
        assert (
            _point_slug({"message_interval": (100.0, 200.0)})
            == "message_interval=100:200"
        )


class TestRunExperiment:
    def test_sweep_writes_per_run_files_and_aggregate(self, ten_node, tmp_path):
        config = small_config(
            ten_node, tmp_path, sweep={"lookback": ["1", "3"]}, repetitions=2
        )
        written = run_experiment(config)
        names = {p.name for p in written}
        assert "aggregate_pis.csv" in names
        for lb in (1, 3):
            for rep in range(2):
                assert f"run_pis_lookback={lb}_rep{rep:02d}.csv" in names
                assert f"run_pis_lookback={lb}_rep{rep:02d}.json" in names
        for p in written:
            assert p.exists() and p.stat().st_size > 0

    def test_float_grid_values_keep_distinct_run_files(self, ten_node, tmp_path):
        # dots in the slug must survive into the filename; Path.with_suffix
        # would truncate "spray_margin=0.2_rep00" at the last dot
        config = small_config(
            ten_node, tmp_path, sweep={"spray_margin": ["0.2", "0.8"]}, repetitions=2
        )
        written = run_experiment(config)
        run_files = [p for p in written if p.name.startswith("run_")]
        assert len(set(run_files)) == len(run_files) == 8
        names = {p.name for p in run_files}
        assert "run_pis_spray_margin=0.2_rep00.csv" in names
        assert "run_pis_spray_margin=0.8_rep01.json" in names
        for p in run_files:
            assert p.exists() and p.stat().st_size > 0

    def test_aggregate_table_shape(self, ten_node, tmp_path):
        config = small_config(
            ten_node, tmp_path, sweep={"lookback": ["1", "3"]}, repetitions=2
        )
        agg = run_experiment(config)[-1]
        lines = agg.read_text().splitlines()
        rows = list(csv.reader(l for l in lines if not l.startswith("#")))
        assert rows[0] == [
            "lookback", "reps", "delivery_ratio", "overhead_ratio",
            "avg_latency_s", "avg_hop_count", "created", "delivered", "relays",
        ]
        assert [r[0] for r in rows[1:]] == ["1", "3"]
        assert all(r[1] == "2" for r in rows[1:])
        assert lines[-2].startswith("# config ")
        assert lines[-1] == "# master_seed 11"

    def test_reps_average_the_finals(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path, repetitions=2)
        written = run_experiment(config)
        finals = []
        for p in written:
            if p.suffix == ".json" and p.name.startswith("run_"):
                finals.append(json.load(open(p))["summary"]["delivered"])
        agg_rows = [
            r for r in written[-1].read_text().splitlines() if not r.startswith("#")
        ]
        header = next(csv.reader([agg_rows[0]]))
        data = next(csv.reader([agg_rows[1]]))
        delivered_mean = float(data[header.index("delivered")])
        assert delivered_mean == pytest.approx(sum(finals) / len(finals))

    def test_single_run_uses_the_master_seed_directly(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path)
        written = run_experiment(config)
        report = json.load(open([p for p in written if p.suffix == ".json"][0]))
        assert report["seed"] == 11

    def test_derived_seeds_differ_across_reps(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path, repetitions=2)
        seeds = set()
        for p in run_experiment(config):
            if p.suffix == ".json":
                seeds.add(json.load(open(p))["seed"])
        assert len(seeds) == 2

    def test_bad_sweep_value_fails_loudly(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path, sweep={"lookback": ["25"]})
        with pytest.raises(ExperimentError, match="lookback=25"):
            run_experiment(config)


class TestCompare:
    def test_routers_share_the_workload(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path)
        reports = compare_routers(config, ["pis", "epidemic", "snw"])
        created = {
            name: sorted((m, r.created_at) for m, r in rep.records.items())
            for name, rep in reports.items()
        }
        assert created["pis"] == created["epidemic"] == created["snw"]

    def test_rendered_table_lists_each_router(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path)
        reports = compare_routers(config, ["pis", "epidemic"])
        text = render_comparison(reports, config.engine.rng_seed)
        lines = text.splitlines()
        assert lines[0].startswith("router,")
        assert lines[1].startswith("pis,") and lines[2].startswith("epidemic,")
        assert lines[-1] == "# seed 11"

    def test_unknown_router_fails_loudly(self, ten_node, tmp_path):
        config = small_config(ten_node, tmp_path)
        with pytest.raises(ExperimentError, match="carrier_pigeon"):
            compare_routers(config, ["carrier_pigeon"])
