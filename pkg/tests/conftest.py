"""Shared fixtures and small builders used across the test suite."""

from __future__ import annotations

import pytest

from sansim.engine import Node
from sansim.ingest import NormalizedTrace, ProfileStore
from sansim.model import ContactEvent, SlotClock
from sansim.synth import ten_node_fixture, twenty_node_fixture


@pytest.fixture(scope="session")
def ten_node():
    return ten_node_fixture()


@pytest.fixture(scope="session")
def twenty_node():
    return twenty_node_fixture()


def make_trace(events, node_count=None, duration=None):
    """NormalizedTrace from (time, a, b, up) tuples; bounds inferred."""
    evs = tuple(ContactEvent(*e) for e in events)
    if node_count is None:
        node_count = 1 + max(max(e.a, e.b) for e in evs) if evs else 1
    if duration is None:
        duration = max((e.time for e in evs), default=0.0)
    return NormalizedTrace(node_count=node_count, duration=duration, events=evs)


class StubEngine:
    """Just enough engine surface to exercise a router in isolation."""

    def __init__(self, node_count, profiles=None, slot_duration=100.0, slots_per_cycle=6):
        self.node_count = node_count
        self.profiles = profiles if profiles is not None else ProfileStore()
        self.clock = SlotClock(slot_duration, slots_per_cycle)
        self.nodes = [Node(i) for i in range(node_count)]
        self._in_flight = set()

    def in_flight(self, sender, message_id):
        return (sender, message_id) in self._in_flight
