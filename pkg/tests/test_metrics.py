import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sansim.metrics import (
    CSV_COLUMNS,
    MetricsCollector,
    MetricsReport,
    delivery_ratio,
    export,
    overhead_ratio,
    render_csv,
    render_json,
    snapshot_from_records,
)


def scripted_collector():
    """Fixed little history with one duplicate arrival and one undelivered."""
    c = MetricsCollector()
    c.on_created(0, 100.0)
    c.on_created(1, 200.0)
    c.on_created(2, 300.0)
    c.on_relayed(0, 150.0)
    c.on_relayed(0, 180.0)
    c.on_delivered(0, 180.0, hop_count=2)
    c.on_relayed(1, 250.0)
    c.on_delivered(1, 250.0, hop_count=1)
    c.on_relayed(1, 400.0)          # late duplicate reaches dst again ...
    c.on_delivered(1, 400.0, 5)     # ... counted as relay, not delivery
    c.on_relayed(2, 350.0)
    return c


def test_counters_follow_the_script():
    c = scripted_collector()
    s = c.snapshot(1000.0)
    assert (s.created, s.delivered, s.relays) == (3, 2, 5)
    assert s.delivery_ratio == pytest.approx(2 / 3)
    assert s.overhead_ratio == pytest.approx((5 - 2) / 2)
    assert s.avg_latency == pytest.approx(((180 - 100) + (250 - 200)) / 2)
    assert s.avg_hop_count == pytest.approx((2 + 1) / 2)


def test_duplicate_delivery_keeps_first_latency_and_hops():
    c = scripted_collector()
    rec = c.records[1]
    assert rec.delivered_at == 250.0
    assert rec.hop_count == 1


def test_empty_denominators_are_zero():
    c = MetricsCollector()
    s = c.snapshot(10.0)
    assert s.delivery_ratio == 0.0 and s.overhead_ratio == 0.0
    assert s.avg_latency == 0.0 and s.avg_hop_count == 0.0
    assert delivery_ratio({}, 10.0) == 0.0
    assert overhead_ratio({}, 10.0) == 0.0


def test_batch_recomputation_matches_incremental_at_any_time():
    c = scripted_collector()
    for t in (99.0, 100.0, 199.0, 260.0, 399.0, 5000.0):
        batch = snapshot_from_records(c.records, t)
        assert batch.created == sum(1 for r in c.records.values() if r.created_at <= t)
        assert batch.delivery_ratio == delivery_ratio(c.records, t)
        assert batch.overhead_ratio == overhead_ratio(c.records, t)
    # and the final incremental snapshot equals the batch one exactly
    assert c.snapshot(5000.0) == snapshot_from_records(c.records, 5000.0)


@settings(max_examples=50)
@given(
    st.lists(
        st.tuples(st.integers(0, 5), st.sampled_from("crd"), st.floats(0, 1000)),
        max_size=60,
    )
)
def test_incremental_equals_batch_on_random_histories(ops):
    """Replay a random but causally-valid event history both ways."""
    c = MetricsCollector()
    t = 0.0
    for mid, op, dt in ops:
        t += dt
        if op == "c" and mid not in c.records:
            c.on_created(mid, t)
        elif op == "r" and mid in c.records:
            c.on_relayed(mid, t)
        elif op == "d" and mid in c.records:
            c.on_relayed(mid, t)  # a delivery arrives via a relay
            c.on_delivered(mid, t, hop_count=1 + mid % 3)
    assert c.snapshot(t) == snapshot_from_records(c.records, t)


class TestRendering:
    def test_csv_shape_and_footers(self):
        c = scripted_collector()
        c.snapshot(3600.0)
        c.snapshot(7200.0)
        report = MetricsReport(c.snapshots, c.records, config={"router": "x"}, seed=9)
        lines = render_csv(report).splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith("1,")  # 3600 s -> 1 h
        assert lines[2].startswith("2,")
        assert lines[3].startswith("# summary created=3 delivered=2 relays=5")
        assert lines[4] == '# config {"router": "x"}'
        assert lines[5] == "# seed 9"

    def test_floats_use_compact_general_format(self):
        c = MetricsCollector()
        c.on_created(0, 0.0)
        c.on_relayed(0, 1.0)
        c.on_delivered(0, 1.0, 1)
        c.on_created(1, 0.0)
        c.on_created(2, 0.0)
        c.snapshot(5400.0)
        row = render_csv(MetricsReport(c.snapshots, c.records)).splitlines()[1]
        cells = row.split(",")
        assert cells[0] == "1.5"
        assert cells[1] == "0.3333333333"  # %.10g

    def test_no_footers_without_config(self):
        c = scripted_collector()
        c.snapshot(100.0)
        text = render_csv(MetricsReport(c.snapshots, c.records))
        assert "# config" not in text and "# seed" not in text

    def test_json_round_trips_and_carries_summary(self):
        c = scripted_collector()
        c.snapshot(3600.0)
        report = MetricsReport(c.snapshots, c.records, config={"router": "x"}, seed=3)
        payload = json.loads(render_json(report))
        assert payload["seed"] == 3
        assert payload["summary"]["delivered"] == 2
        assert payload["snapshots"][0]["t_hours"] == 1.0

    def test_export_writes_both_formats(self, tmp_path):
        c = scripted_collector()
        c.snapshot(100.0)
        report = MetricsReport(c.snapshots, c.records, config={}, seed=1)
        export(report, tmp_path / "r.csv", "csv")
        export(report, tmp_path / "r.json", "json")
        assert (tmp_path / "r.csv").read_text().startswith("t_hours,")
        json.loads((tmp_path / "r.json").read_text())
        with pytest.raises(ValueError):
            export(report, tmp_path / "r.xml", "xml")
