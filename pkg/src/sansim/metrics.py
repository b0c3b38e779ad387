"""The four evaluation metrics, collected two ways.

The engine feeds an incremental collector (cheap counters updated per event).
The same snapshot can be recomputed batch-style from the per-message delivery
records; the two routes must agree and the tests hold them to it.

Overhead uses (relays - deliveries) / deliveries, the convention under which
a purely direct delivery scores 0; the raw relays count is exported next to
it.  Latency and hop averages cover delivered messages only.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

CSV_COLUMNS = (
    "t_hours",
    "delivery_ratio",
    "overhead_ratio",
    "avg_latency_s",
    "avg_hop_count",
    "created",
    "delivered",
    "relays",
)


@dataclass
class DeliveryRecord:
    """Lifetime bookkeeping of one message id."""

    message_id: int
    created_at: float
    delivered_at: Optional[float] = None
    hop_count: int = 0
    relay_times: list[float] = field(default_factory=list)

    @property
    def relays(self) -> int:
        return len(self.relay_times)

    def relays_by(self, t: float) -> int:
        return bisect.bisect_right(self.relay_times, t)


@dataclass(frozen=True)
class MetricsSnapshot:
    t: float
    delivery_ratio: float
    overhead_ratio: float
    avg_latency: float
    avg_hop_count: float
    created: int
    delivered: int
    relays: int


def delivery_ratio(records: dict[int, DeliveryRecord], t: float) -> float:
    """Delivered-by-t over created-by-t; 0 when nothing was created."""
    created = sum(1 for r in records.values() if r.created_at <= t)
    if created == 0:
        return 0.0
    delivered = sum(
        1 for r in records.values() if r.delivered_at is not None and r.delivered_at <= t
    )
    return delivered / created


def overhead_ratio(records: dict[int, DeliveryRecord], t: float) -> float:
    """(relays - deliveries) / deliveries by time t; 0 when nothing delivered."""
    delivered = sum(
        1 for r in records.values() if r.delivered_at is not None and r.delivered_at <= t
    )
    if delivered == 0:
        return 0.0
    relays = sum(r.relays_by(t) for r in records.values())
    return (relays - delivered) / delivered


def snapshot_from_records(records: dict[int, DeliveryRecord], t: float) -> MetricsSnapshot:
    """Batch recomputation of a snapshot from delivery records alone."""
    created = 0
    delivered = 0
    relays = 0
    latencies = []
    hops_sum = 0
    for r in records.values():
        if r.created_at <= t:
            created += 1
        relays += r.relays_by(t)
        if r.delivered_at is not None and r.delivered_at <= t:
            delivered += 1
            latencies.append(r.delivered_at - r.created_at)
            hops_sum += r.hop_count
    return MetricsSnapshot(
        t=t,
        delivery_ratio=delivered / created if created else 0.0,
        overhead_ratio=(relays - delivered) / delivered if delivered else 0.0,
        avg_latency=math.fsum(latencies) / delivered if delivered else 0.0,
        avg_hop_count=hops_sum / delivered if delivered else 0.0,
        created=created,
        delivered=delivered,
        relays=relays,
    )


class MetricsCollector:
    """Incremental route: counters maintained as the engine reports events."""

    def __init__(self):
        self.records: dict[int, DeliveryRecord] = {}
        self.created = 0
        self.delivered = 0
        self.relays = 0
        # exact (fsum) so the delivery-order sum here and the record-order
        # sum in snapshot_from_records cannot drift apart by rounding
        self.latencies: list[float] = []
        self.hops_sum = 0
        self.snapshots: list[MetricsSnapshot] = []

    def on_created(self, message_id: int, t: float):
        self.records[message_id] = DeliveryRecord(message_id, created_at=t)
        self.created += 1

    def on_relayed(self, message_id: int, t: float):
        self.records[message_id].relay_times.append(t)
        self.relays += 1

    def on_delivered(self, message_id: int, t: float, hop_count: int):
        rec = self.records[message_id]
        if rec.delivered_at is not None:
            return  # duplicate arrival; already counted as a relay only
        rec.delivered_at = t
        rec.hop_count = hop_count
        self.delivered += 1
        self.latencies.append(t - rec.created_at)
        self.hops_sum += hop_count

    def snapshot(self, t: float) -> MetricsSnapshot:
        snap = MetricsSnapshot(
            t=t,
            delivery_ratio=self.delivered / self.created if self.created else 0.0,
            overhead_ratio=(self.relays - self.delivered) / self.delivered
            if self.delivered
            else 0.0,
            avg_latency=math.fsum(self.latencies) / self.delivered
            if self.delivered
            else 0.0,
            avg_hop_count=self.hops_sum / self.delivered if self.delivered else 0.0,
            created=self.created,
            delivered=self.delivered,
            relays=self.relays,
        )
        self.snapshots.append(snap)
        return snap


@dataclass
class MetricsReport:
    """Finalized run output: the time series plus the resolved configuration."""

    snapshots: list[MetricsSnapshot] = field(default_factory=list)
    records: dict[int, DeliveryRecord] = field(default_factory=dict)
    config: Optional[dict] = None
    seed: Optional[int] = None

    @property
    def final(self) -> Optional[MetricsSnapshot]:
        return self.snapshots[-1] if self.snapshots else None


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.10g" % x
    return str(x)


def _snapshot_row(s: MetricsSnapshot) -> list[str]:
    return [
        _fmt(s.t / 3600.0),
        _fmt(s.delivery_ratio),
        _fmt(s.overhead_ratio),
        _fmt(s.avg_latency),
        _fmt(s.avg_hop_count),
        str(s.created),
        str(s.delivered),
        str(s.relays),
    ]


def render_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in report.snapshots:
        w.writerow(_snapshot_row(s))
    if report.config is not None:
        final = report.final
        if final is not None:
            buf.write(
                "# summary created=%d delivered=%d relays=%d delivery_ratio=%s "
                "overhead_ratio=%s avg_latency_s=%s avg_hop_count=%s\n"
                % (
                    final.created,
                    final.delivered,
                    final.relays,
                    _fmt(final.delivery_ratio),
                    _fmt(final.overhead_ratio),
                    _fmt(final.avg_latency),
                    _fmt(final.avg_hop_count),
                )
            )
        buf.write("# config %s\n" % json.dumps(report.config, sort_keys=True))
        buf.write("# seed %s\n" % report.seed)
    return buf.getvalue()


def render_json(report: MetricsReport) -> str:
    payload = {
        "config": report.config,
        "seed": report.seed,
        "snapshots": [
            {
                "t_hours": s.t / 3600.0,
                "delivery_ratio": s.delivery_ratio,
                "overhead_ratio": s.overhead_ratio,
                "avg_latency_s": s.avg_latency,
                "avg_hop_count": s.avg_hop_count,
                "created": s.created,
                "delivered": s.delivered,
                "relays": s.relays,
            }
            for s in report.snapshots
        ],
    }
    final = report.final
    payload["summary"] = (
        None
        if final is None
        else {
            "created": final.created,
            "delivered": final.delivered,
            "relays": final.relays,
            "delivery_ratio": final.delivery_ratio,
            "overhead_ratio": final.overhead_ratio,
            "avg_latency_s": final.avg_latency,
            "avg_hop_count": final.avg_hop_count,
        }
    )
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def export(report: MetricsReport, path, fmt: str = "csv"):
    """Write the report to path as csv or json."""
    if fmt == "csv":
        text = render_csv(report)
    elif fmt == "json":
        text = render_json(report)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
