from sansim.metrics import MetricsReport, MetricsSnapshot
from sansim.plots import comparison_figure, sweep_figure, timeseries_figure


def _report(scale=1.0):
    snaps = [
        MetricsSnapshot(
            t=3600.0 * k,
            created=10 * k,
            delivered=4 * k,
            relays=9 * k,
            delivery_ratio=0.4 * scale,
            overhead_ratio=1.2,
            avg_latency=300.0 * k,
            avg_hop_count=2.5,
        )
        for k in range(1, 4)
    ]
    return MetricsReport(snapshots=snaps)


def test_timeseries_figure_writes_png(tmp_path):
    out = timeseries_figure(_report(), tmp_path / "run.png")
    assert out.stat().st_size > 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_comparison_figure_writes_png(tmp_path):
    reports = {"epidemic": _report(1.0), "snw": _report(0.5)}
    out = comparison_figure(reports, tmp_path / "cmp.png")
    assert out.stat().st_size > 0


def test_sweep_figure_writes_png(tmp_path):
    means = {
        "delivery_ratio": 0.5,
        "overhead_ratio": 2.0,
        "avg_latency": 100.0,
        "avg_hop_count": 2.0,
    }
    rows = [(1, means), (3, dict(means, delivery_ratio=0.7))]
    out = sweep_figure("lookback", rows, tmp_path / "sweep.png")
    assert out.stat().st_size > 0


def test_empty_report_still_renders(tmp_path):
    out = timeseries_figure(MetricsReport(), tmp_path / "empty.png")
    assert out.stat().st_size > 0
