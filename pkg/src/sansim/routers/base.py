"""Router interface shared by every forwarding strategy.

A router decides; the engine executes.  On each link-up the engine calls
on_contact, which first lets the strategy update its per-node state and then
evaluates every buffered message in both directions.  When a node gains a
replica mid-contact (new message, or one relayed in from a third party) the
engine re-offers just that replica on the node's live links via
evaluate_offer; no state exchange happens outside link-up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from ..model import Message, NodeId

if TYPE_CHECKING:
    from ..engine import Node, Simulation

# how the engine applies a completed transfer to the sender's replica
COPY = "copy"  # receiver gets a single copy, sender keeps its replica
SPLIT = "split"  # replica budget split between sender and receiver
HANDOFF = "handoff"  # whole replica moves, sender deletes
DELIVER = "deliver"  # receiver is the destination; sender deletes


@dataclass(frozen=True)
class TransferDirective:
    message_id: int
    sender: NodeId
    receiver: NodeId
    mode: str


class Router:
    """Base strategy; subclasses override _decide and the state hooks."""

    name = "base"
    initial_copies = 1

    def __init__(self):
        self.engine: Optional["Simulation"] = None

    def bind(self, engine: "Simulation"):
        """Called once at run start, before any event is processed."""
        self.engine = engine

    def describe(self) -> dict:
        """Resolved parameters for the report's config echo."""
        return {"router": self.name, "initial_copies": self.initial_copies}

    # -- state hooks -------------------------------------------------------
    def on_contact_state(self, node_a: "Node", node_b: "Node", now: float):
        """Per-encounter state maintenance (information exchange)."""

    def on_replica_received(self, node: "Node", replica: Message, now: float):
        """Called after a relayed replica lands in node's buffer."""

    def on_message_created(self, node: "Node", replica: Message, now: float):
        """Called when a new message enters its source node's buffer."""

    # -- decisions ---------------------------------------------------------
    def on_contact(self, node_a: "Node", node_b: "Node", now: float) -> list[TransferDirective]:
        self.on_contact_state(node_a, node_b, now)
        directives = []
        for sender, receiver in ((node_b, node_a), (node_a, node_b)):
            for replica in list(sender.buffer.values()):
                d = self.evaluate_offer(sender, receiver, replica, now)
                if d is not None:
                    directives.append(d)
        return directives

    def evaluate_offer(
        self, sender: "Node", receiver: "Node", replica: Message, now: float
    ) -> Optional[TransferDirective]:
        """Decide whether sender should push this replica to receiver now."""
        if self.engine.in_flight(sender.id, replica.id):
            return None
        if replica.dst == receiver.id:
            # destination short-circuit: always deliver, whatever the utility
            return TransferDirective(replica.id, sender.id, receiver.id, DELIVER)
        if replica.id in receiver.buffer:
            return None  # duplicate suppression
        mode = self._decide(sender, receiver, replica, now)
        if mode is None:
            return None
        return TransferDirective(replica.id, sender.id, receiver.id, mode)

    def _decide(
        self, sender: "Node", receiver: "Node", replica: Message, now: float
    ) -> Optional[str]:
        raise NotImplementedError
