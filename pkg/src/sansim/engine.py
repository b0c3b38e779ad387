"""Discrete-event simulation core.

Replays a contact trace, generates unicast traffic after the warm-up, asks
the active router what to transfer on each encounter, and enforces the
physical constraints the router ignores: link bandwidth, buffer capacity,
and message TTL.

Event ordering at equal timestamps is (transfer-complete, message-generate,
link-down, link-up, snapshot), then scheduling order; a transfer finishing
exactly when its link drops therefore counts as completed.  TTL expiry is
swept at every event boundary with strict inequality (a replica aged exactly
ttl survives).

Copy accounting: every message id has a ledger with the copies issued
(initial budget, plus one per flooding-style COPY), the live sum of nof_copy
over all buffered replicas, and the copies consumed by delivery, expiry, or
drop.  issued == live + consumed holds at every event boundary; tests can
install `boundary_probe` to check it after each event.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, fields
from typing import Callable, Optional

from .ingest import NormalizedTrace, ProfileStore
from .metrics import MetricsCollector, MetricsReport
from .model import Message, NodeId, SlotClock
from .routers.base import COPY, DELIVER, HANDOFF, SPLIT, Router, TransferDirective
from .routers.pis import split_copies

# event kinds, in processing order at equal timestamps
EV_COMPLETE, EV_GEN, EV_DOWN, EV_UP, EV_SNAPSHOT = range(5)


class EngineError(ValueError):
    """Invalid simulation input or configuration."""


@dataclass(frozen=True)
class EngineConfig:
    duration: float = 144_000.0  # 40 h
    warmup: float = 5_000.0
    transmit_speed: float = 250_000.0  # bytes/s
    message_interval: tuple[float, float] = (500.0, 650.0)  # s between creations
    message_size: tuple[int, int] = (500_000, 1_024_000)  # bytes
    ttl: float = 36_000.0  # 10 h
    buffer_capacity: int = 5_000_000  # bytes per node
    rng_seed: int = 1
    slot_duration: float = 3600.0
    slots_per_cycle: int = 24
    snapshot_interval: float = 3600.0

    def __post_init__(self):
        if not 0 <= self.warmup < self.duration:
            raise EngineError("need 0 <= warmup < duration")
        lo, hi = self.message_interval
        if not 0 < lo <= hi:
            raise EngineError("message_interval range must be positive and non-empty")
        lo, hi = self.message_size
        if not 0 < lo <= hi:
            raise EngineError("message_size range must be positive and non-empty")
        if self.transmit_speed <= 0:
            raise EngineError("transmit_speed must be positive")
        if self.ttl <= 0:
            raise EngineError("ttl must be positive")
        if self.buffer_capacity <= 0:
            raise EngineError("buffer_capacity must be positive")
        if self.snapshot_interval <= 0:
            raise EngineError("snapshot_interval must be positive")

    def make_clock(self) -> SlotClock:
        return SlotClock(self.slot_duration, self.slots_per_cycle)

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


class Node:
    __slots__ = ("id", "buffer", "buffer_used")

    def __init__(self, node_id: NodeId):
        self.id = node_id
        self.buffer: dict[int, Message] = {}  # insertion order == receipt order
        self.buffer_used = 0


class Link:
    __slots__ = ("up", "epoch", "busy_until", "pending")

    def __init__(self):
        self.up = False
        self.epoch = 0  # bumped on every link-down; orphans in-flight transfers
        self.busy_until = 0.0
        self.pending: set[tuple[NodeId, int]] = set()  # (sender, message id)


@dataclass
class CopyLedger:
    issued: int = 0
    live: int = 0
    delivered: int = 0
    expired: int = 0
    dropped: int = 0

    @property
    def consumed(self) -> int:
        return self.delivered + self.expired + self.dropped


class Simulation:
    """One deterministic run: single-threaded, all state owned here."""

    def __init__(
        self,
        trace: NormalizedTrace,
        profiles: ProfileStore,
        router: Router,
        config: EngineConfig,
    ):
        self.trace = trace
        self.profiles = profiles
        self.router = router
        self.config = config
        self.node_count = trace.node_count
        self.clock = config.make_clock()
        self.nodes = [Node(i) for i in range(self.node_count)]
        self.links: dict[tuple[NodeId, NodeId], Link] = {}
        self._peer_links: list[dict[NodeId, Link]] = [
            {} for _ in range(self.node_count)
        ]
        self._in_flight: set[tuple[NodeId, int]] = set()
        self.collector = MetricsCollector()
        self.ledger: dict[int, CopyLedger] = {}
        self._touched: set[int] = set()  # message ids whose ledger changed this event
        self.boundary_probe: Optional[Callable[["Simulation", float], None]] = None
        self.now = 0.0
        self._heap: list = []
        self._seq = 0
        self._schedule_all()

    # -- scheduling ----------------------------------------------------------

    def _push(self, time: float, kind: int, payload):
        self._seq += 1
        heapq.heappush(self._heap, (time, kind, self._seq, payload))

    def _schedule_all(self):
        cfg = self.config
        for ev in self.trace.events:
            self._push(ev.time, EV_UP if ev.up else EV_DOWN, (ev.a, ev.b))
        # traffic is drawn up-front from its own stream so that the same
        # seed yields the same workload whatever the router does
        rng = random.Random(cfg.rng_seed)
        if self.node_count >= 2:
            t = cfg.warmup
            msg_id = 0
            while True:
                t += rng.uniform(*cfg.message_interval)
                if t > cfg.duration:
                    break
                src = rng.randrange(self.node_count)
                dst = rng.randrange(self.node_count - 1)
                if dst >= src:
                    dst += 1
                size = rng.randint(*cfg.message_size)
                self._push(t, EV_GEN, (msg_id, src, dst, size))
                msg_id += 1
        k = 1
        while k * cfg.snapshot_interval < cfg.duration:
            self._push(k * cfg.snapshot_interval, EV_SNAPSHOT, None)
            k += 1
        self._push(cfg.duration, EV_SNAPSHOT, None)

    # -- links ---------------------------------------------------------------

    @staticmethod
    def _pair(a: NodeId, b: NodeId) -> tuple[NodeId, NodeId]:
        return (a, b) if a < b else (b, a)

    def _link(self, a: NodeId, b: NodeId) -> Link:
        pair = self._pair(a, b)
        link = self.links.get(pair)
        if link is None:
            link = Link()
            self.links[pair] = link
            self._peer_links[a][b] = link
            self._peer_links[b][a] = link
        return link

    def in_flight(self, sender: NodeId, message_id: int) -> bool:
        return (sender, message_id) in self._in_flight

    # -- run loop ------------------------------------------------------------

    def run(self) -> MetricsReport:
        self.router.bind(self)
        duration = self.config.duration
        heap = self._heap
        while heap:
            time, kind, _, payload = heapq.heappop(heap)
            if time > duration:
                break  # transfers still in flight at the end deliver nothing
            self.now = time
            self._sweep_expired(time)
            if kind == EV_COMPLETE:
                self._on_complete(payload, time)
            elif kind == EV_GEN:
                self._on_generate(payload, time)
            elif kind == EV_DOWN:
                self._on_link_down(payload)
            elif kind == EV_UP:
                self._on_link_up(payload, time)
            else:
                self.collector.snapshot(time)
            if self.boundary_probe is not None:
                self.boundary_probe(self, time)
            self._touched.clear()
        return MetricsReport(
            snapshots=self.collector.snapshots,
            records=self.collector.records,
            config=self._config_echo(),
            seed=self.config.rng_seed,
        )

    def _config_echo(self) -> dict:
        echo = self.config.as_dict()
        echo["trace_nodes"] = self.node_count
        echo.update(self.router.describe())
        return echo

    # -- TTL -----------------------------------------------------------------

    def expire_ttl(self, node: Node, now: float) -> list[int]:
        """Remove over-age replicas; returns the expired message ids."""
        stale = [mid for mid, m in node.buffer.items() if m.expired(now)]
        for mid in stale:
            replica = node.buffer.pop(mid)
            node.buffer_used -= replica.size
            led = self.ledger[mid]
            led.live -= replica.nof_copy
            led.expired += replica.nof_copy
            self._touched.add(mid)
        return stale

    def _sweep_expired(self, now: float):
        for node in self.nodes:
            if node.buffer:
                self.expire_ttl(node, now)

    # -- buffers -------------------------------------------------------------

    def enforce_buffer(self, node: Node, incoming: Message) -> bool:
        """Make room FIFO-style and insert; False refuses an oversize message."""
        cap = self.config.buffer_capacity
        if incoming.size > cap:
            return False
        while cap - node.buffer_used < incoming.size:
            oldest_id = next(iter(node.buffer))
            dropped = node.buffer.pop(oldest_id)
            node.buffer_used -= dropped.size
            led = self.ledger[oldest_id]
            led.live -= dropped.nof_copy
            led.dropped += dropped.nof_copy
            self._touched.add(oldest_id)
        node.buffer[incoming.id] = incoming
        node.buffer_used += incoming.size
        return True

    # -- event handlers ------------------------------------------------------

    def _on_generate(self, payload, now: float):
        msg_id, src, dst, size = payload
        msg = Message(
            msg_id,
            src,
            dst,
            size,
            created_at=now,
            ttl=self.config.ttl,
            nof_copy=self.router.initial_copies,
        )
        self.collector.on_created(msg_id, now)
        led = CopyLedger(issued=msg.nof_copy)
        self.ledger[msg_id] = led
        self._touched.add(msg_id)
        node = self.nodes[src]
        if self.enforce_buffer(node, msg):
            led.live += msg.nof_copy
            self.router.on_message_created(node, msg, now)
            self._offer_on_live_links(node, msg, now)
        else:
            led.dropped += msg.nof_copy

    def _on_link_up(self, payload, now: float):
        a, b = payload
        link = self._link(a, b)
        link.up = True
        link.busy_until = now
        directives = self.router.on_contact(self.nodes[a], self.nodes[b], now)
        for d in directives:
            self._start_transfer(d, now)

    def _on_link_down(self, payload):
        a, b = payload
        link = self._link(a, b)
        link.up = False
        link.epoch += 1
        link.busy_until = 0.0
        for entry in link.pending:  # aborted mid-air; receivers get nothing
            self._in_flight.discard(entry)
        link.pending.clear()

    def _start_transfer(self, d: TransferDirective, now: float):
        sender = self.nodes[d.sender]
        replica = sender.buffer.get(d.message_id)
        if replica is None or (d.sender, d.message_id) in self._in_flight:
            return
        link = self._link(d.sender, d.receiver)
        if not link.up:
            return
        start = max(now, link.busy_until)  # one transfer at a time per link
        end = start + replica.size / self.config.transmit_speed
        link.busy_until = end
        link.pending.add((d.sender, d.message_id))
        self._in_flight.add((d.sender, d.message_id))
        self._push(end, EV_COMPLETE, (self._pair(d.sender, d.receiver), link.epoch, d))

    def _on_complete(self, payload, now: float):
        pair, epoch, d = payload
        link = self.links.get(pair)
        if link is None or link.epoch != epoch or not link.up:
            return  # link dropped mid-transfer; partial transfers deliver nothing
        link.pending.discard((d.sender, d.message_id))
        self._in_flight.discard((d.sender, d.message_id))
        sender = self.nodes[d.sender]
        receiver = self.nodes[d.receiver]
        replica = sender.buffer.get(d.message_id)
        if replica is None:
            return  # sender lost the replica to expiry/eviction mid-transfer
        led = self.ledger[d.message_id]
        self._touched.add(d.message_id)

        if d.mode == DELIVER:
            # the destination consumes the message; the carrier's budget is
            # spent, so later encounters cannot re-deliver from this replica
            del sender.buffer[d.message_id]
            sender.buffer_used -= replica.size
            led.live -= replica.nof_copy
            led.delivered += replica.nof_copy
            self.collector.on_relayed(d.message_id, now)
            self.collector.on_delivered(d.message_id, now, replica.hop_count + 1)
            return

        if d.message_id in receiver.buffer:
            return  # a third party got there first; decision is stale

        if d.mode == COPY:
            incoming = replica.handed_to(1)
            if not self.enforce_buffer(receiver, incoming):
                return
            led.issued += 1  # flooding mints a fresh copy
            led.live += 1
        elif d.mode == SPLIT:
            if replica.nof_copy < 2:
                return  # budget shrank below splittable while in flight
            kept, given = split_copies(replica.nof_copy)
            incoming = replica.handed_to(given)
            if not self.enforce_buffer(receiver, incoming):
                return
            replica.nof_copy = kept
        elif d.mode == HANDOFF:
            incoming = replica.handed_to(replica.nof_copy)
            if not self.enforce_buffer(receiver, incoming):
                return
            del sender.buffer[d.message_id]
            sender.buffer_used -= replica.size
        else:
            raise EngineError(f"unknown transfer mode {d.mode!r}")

        self.collector.on_relayed(d.message_id, now)
        self.router.on_replica_received(receiver, incoming, now)
        self._offer_on_live_links(receiver, incoming, now)
        if d.message_id in sender.buffer:
            # the sender may have budget left for other peers it is currently
            # in contact with — offers were suppressed while this was in flight
            self._offer_on_live_links(sender, replica, now)

    def _offer_on_live_links(self, node: Node, replica: Message, now: float):
        if replica.id not in node.buffer:
            return
        for peer_id in sorted(self._peer_links[node.id]):
            link = self._peer_links[node.id][peer_id]
            if not link.up:
                continue
            d = self.router.evaluate_offer(node, self.nodes[peer_id], replica, now)
            if d is not None:
                self._start_transfer(d, now)


def run(
    trace: NormalizedTrace,
    profiles: ProfileStore,
    router: Router,
    config: EngineConfig,
) -> MetricsReport:
    """Convenience wrapper: build a Simulation and run it to completion."""
    return Simulation(trace, profiles, router, config).run()
