"""Shared domain types: contact events, the cyclic slot clock, messages.

Node ids are plain ints, dense in [0, N).  Interest topics are interned to
ints by the profile loader.  All times are seconds since the trace epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

NodeId = int
InterestId = int

SECONDS_PER_DAY = 86_400.0


@dataclass(frozen=True)
class ContactEvent:
    """One link-up or link-down record between two nodes."""

    time: float
    a: NodeId
    b: NodeId
    up: bool

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"contact event links node {self.a} to itself")


@dataclass(frozen=True)
class SlotClock:
    """Maps simulation time onto a repeating slot-of-day index.

    The cycle defaults to one day of 1-hour slots; synthetic tests may use
    shorter cycles.
    """

    slot_duration: float = 3600.0
    slots_per_cycle: int = 24

    def __post_init__(self):
        if self.slot_duration <= 0:
            raise ValueError("slot_duration must be positive")
        if self.slots_per_cycle < 1:
            raise ValueError("slots_per_cycle must be >= 1")

    @property
    def cycle_length(self) -> float:
        return self.slot_duration * self.slots_per_cycle

    def slot_of(self, t: float) -> int:
        """Slot-of-cycle index for time t (t >= 0)."""
        return int(t // self.slot_duration) % self.slots_per_cycle

    def lookback_slots(self, current_slot: int, i: int) -> list[int]:
        """The i slot indices starting at current_slot, wrapping at the cycle.

        Position t in the returned list is the exponent input of the decay
        weight applied by the similarity functions.
        """
        if not 1 <= i <= self.slots_per_cycle:
            raise ValueError(
                f"lookback must be in [1, {self.slots_per_cycle}], got {i}"
            )
        s = self.slots_per_cycle
        return [(current_slot + t) % s for t in range(i)]


@dataclass(frozen=True)
class SimilarityTriple:
    """Per-dimension similarities of one node toward a destination."""

    pro: float = 0.0
    ins: float = 0.0
    soc: float = 0.0


@dataclass
class Message:
    """A routable replica.

    Each carrier holds its own instance; nof_copy is the replica's remaining
    copy budget and attached_sim is the similarity triple of the node that
    last accepted this replica, computed toward dst at acceptance time.
    """

    id: int
    src: NodeId
    dst: NodeId
    size: int
    created_at: float
    ttl: float
    nof_copy: int = 1
    hop_count: int = 0
    attached_sim: Optional[SimilarityTriple] = None

    def expired(self, now: float) -> bool:
        # strict: a replica aged exactly ttl is still alive
        return now - self.created_at > self.ttl

    def handed_to(self, nof_copy: int) -> "Message":
        """The replica a receiving carrier ends up with after one transfer."""
        return replace(
            self, nof_copy=nof_copy, hop_count=self.hop_count + 1, attached_sim=None
        )
