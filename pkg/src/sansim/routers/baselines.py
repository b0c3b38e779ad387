"""The comparison strategies: flooding, delivery predictability, ego-network
centrality, and plain bounded spraying.

All four run behind the same engine contract as the social router, so their
buffer, TTL and bandwidth handling is identical by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..model import Message, NodeId
from .base import COPY, HANDOFF, SPLIT, Router
from .pis import split_copies


class EpidemicRouter(Router):
    """Flooding: copy every buffered message to any peer that lacks it."""

    name = "epidemic"

    def _decide(self, sender, receiver, replica, now) -> Optional[str]:
        return COPY


class SprayAndWaitRouter(Router):
    """Binary spraying of a bounded copy budget, then direct-only delivery."""

    name = "snw"

    def __init__(self, copies: int = 8):
        super().__init__()
        if copies < 1:
            raise ValueError("copies must be >= 1")
        self.copies = copies

    @property
    def initial_copies(self):
        return self.copies

    def _decide(self, sender, receiver, replica, now) -> Optional[str]:
        if replica.nof_copy > 1:
            return SPLIT
        return None  # wait phase: destination handled by the base short-circuit


@dataclass
class ProphetConfig:
    p_init: float = 0.75
    transitivity: float = 0.25
    aging_base: float = 0.98
    aging_unit: float = 1.0  # seconds per aging step

    def __post_init__(self):
        if not 0.0 < self.p_init <= 1.0:
            raise ValueError("p_init must lie in (0, 1]")
        if not 0.0 < self.aging_base < 1.0:
            raise ValueError("aging_base must lie in (0, 1)")


class ProphetState:
    __slots__ = ("predictability", "last_aged_at")

    def __init__(self):
        self.predictability: dict[NodeId, float] = {}
        self.last_aged_at = 0.0


class ProphetRouter(Router):
    """Delivery-predictability routing: age, direct update, transitivity,
    then copy toward the node with the strictly higher predictability."""

    name = "prophet"

    def __init__(self, config: ProphetConfig | None = None):
        super().__init__()
        self.config = config or ProphetConfig()
        self.states: dict[NodeId, ProphetState] = {}

    def bind(self, engine):
        super().bind(engine)
        self.states = {n: ProphetState() for n in range(engine.node_count)}

    def describe(self):
        cfg = self.config
        return {
            "router": self.name,
            "initial_copies": self.initial_copies,
            "p_init": cfg.p_init,
            "transitivity": cfg.transitivity,
            "aging_base": cfg.aging_base,
            "aging_unit": cfg.aging_unit,
        }

    def _age(self, state: ProphetState, now: float):
        dt = now - state.last_aged_at
        if dt > 0:
            factor = self.config.aging_base ** (dt / self.config.aging_unit)
            for k in state.predictability:
                state.predictability[k] *= factor
        state.last_aged_at = now

    def predictability(self, node_id: NodeId, dst: NodeId, now: float) -> float:
        state = self.states[node_id]
        self._age(state, now)
        return state.predictability.get(dst, 0.0)

    def on_contact_state(self, node_a, node_b, now):
        sa = self.states[node_a.id]
        sb = self.states[node_b.id]
        self._age(sa, now)
        self._age(sb, now)
        cfg = self.config
        for mine, peer_id in ((sa, node_b.id), (sb, node_a.id)):
            p = mine.predictability.get(peer_id, 0.0)
            mine.predictability[peer_id] = p + (1.0 - p) * cfg.p_init
        # transitivity through the post-direct-update tables; snapshots keep
        # the exchange symmetric regardless of which side goes first
        snap_a = dict(sa.predictability)
        snap_b = dict(sb.predictability)
        for mine, theirs, own_id, peer_id in (
            (sa, snap_b, node_a.id, node_b.id),
            (sb, snap_a, node_b.id, node_a.id),
        ):
            p_peer = mine.predictability[peer_id]
            for c in sorted(theirs):
                if c == own_id:
                    continue
                p_old = mine.predictability.get(c, 0.0)
                mine.predictability[c] = (
                    p_old + (1.0 - p_old) * p_peer * theirs[c] * cfg.transitivity
                )

    def _decide(self, sender, receiver, replica, now) -> Optional[str]:
        p_recv = self.predictability(receiver.id, replica.dst, now)
        p_send = self.predictability(sender.id, replica.dst, now)
        if p_recv > p_send:
            return COPY
        return None


class SimBetState:
    __slots__ = ("contacts", "rows", "_betweenness", "_dirty")

    def __init__(self):
        self.contacts: set[NodeId] = set()
        self.rows: dict[NodeId, frozenset[NodeId]] = {}
        self._betweenness: float = 0.0
        self._dirty = True


class SimBetRouter(Router):
    """Ego betweenness plus common-neighbour similarity over a binary ego
    matrix; single-copy hand-off toward the higher combined utility."""

    name = "simbet"

    def __init__(self, balance: float = 0.5):
        super().__init__()
        if not 0.0 <= balance <= 1.0:
            raise ValueError("balance must lie in [0, 1]")
        self.balance = balance  # weight of similarity vs betweenness
        self.states: dict[NodeId, SimBetState] = {}

    def bind(self, engine):
        super().bind(engine)
        self.states = {n: SimBetState() for n in range(engine.node_count)}

    def describe(self):
        return {
            "router": self.name,
            "initial_copies": self.initial_copies,
            "balance": self.balance,
        }

    def on_contact_state(self, node_a, node_b, now):
        sa = self.states[node_a.id]
        sb = self.states[node_b.id]
        sa.contacts.add(node_b.id)
        sb.contacts.add(node_a.id)
        # binary row exchange: each side learns the other's contact set
        sa.rows[node_b.id] = frozenset(sb.contacts)
        sb.rows[node_a.id] = frozenset(sa.contacts)
        sa._dirty = True
        sb._dirty = True

    def _adjacent(self, state: SimBetState, u: NodeId, v: NodeId) -> bool:
        return v in state.rows.get(u, ()) or u in state.rows.get(v, ())

    def betweenness(self, node_id: NodeId) -> float:
        """Ego betweenness: sum over non-adjacent neighbour pairs of the
        reciprocal number of two-hop paths inside the ego network."""
        state = self.states[node_id]
        if not state._dirty:
            return state._betweenness
        neighbours = sorted(state.contacts)
        ego_nodes = [node_id] + neighbours
        total = 0.0
        for idx, u in enumerate(neighbours):
            for v in neighbours[idx + 1 :]:
                if self._adjacent(state, u, v):
                    continue
                # both are tied to the ego, so at least one two-hop path exists
                paths = sum(
                    1
                    for w in ego_nodes
                    if w not in (u, v)
                    and (w == node_id or self._adjacent(state, u, w))
                    and (w == node_id or self._adjacent(state, w, v))
                )
                total += 1.0 / paths
        state._betweenness = total
        state._dirty = False
        return total

    def neighbours_of(self, node_id: NodeId, target: NodeId) -> set[NodeId]:
        state = self.states[node_id]
        if target == node_id:
            return set(state.contacts)
        out = set(state.rows.get(target, ()))
        for u, row in state.rows.items():
            if target in row:
                out.add(u)
        return out

    def similarity(self, node_id: NodeId, dst: NodeId) -> int:
        """Common-neighbour count between this node and dst in its local view."""
        return len(self.neighbours_of(node_id, node_id) & self.neighbours_of(node_id, dst))

    @staticmethod
    def _ratio(a: float, b: float) -> float:
        total = a + b
        if total == 0:
            return 0.5
        return a / total

    def utility(self, node_id: NodeId, other_id: NodeId, dst: NodeId) -> float:
        sim_part = self._ratio(
            self.similarity(node_id, dst), self.similarity(other_id, dst)
        )
        bet_part = self._ratio(self.betweenness(node_id), self.betweenness(other_id))
        return self.balance * sim_part + (1.0 - self.balance) * bet_part

    def _decide(self, sender, receiver, replica, now) -> Optional[str]:
        u_recv = self.utility(receiver.id, sender.id, replica.dst)
        u_send = self.utility(sender.id, receiver.id, replica.dst)
        if u_recv > u_send:
            return HANDOFF
        return None
