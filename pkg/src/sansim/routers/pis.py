"""Multi-dimensional social routing: proximity + interests + relationships.

On every encounter the two nodes exchange contact lists, self-interests and
friend lists, update their slot-indexed social state, and then compare their
similarity toward each buffered message's destination.  The comparison uses
the relative deviation per dimension, combined into one utility; a replica
with budget left is split toward the better-placed peer when the utility
clears -spray_margin, and a last copy is handed off outright when the
utility is strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..model import Message, SimilarityTriple
from ..similarity import SimilarityParams, compute_triple, sim_dev, sim_pis
from ..social import SlotSocialState
from .base import HANDOFF, SPLIT, Router


def split_copies(n: int) -> tuple[int, int]:
    """Binary split of a replica budget: (kept, given), given = floor(n/2)."""
    if n < 2:
        raise ValueError(f"cannot split a budget of {n}")
    given = n // 2
    return n - given, given


@dataclass(frozen=True)
class PisConfig:
    params: SimilarityParams = field(default_factory=SimilarityParams)
    spray_margin: float = 0.8  # widens the multi-copy forwarding range
    initial_copies: int = 8
    fresh_peer_sim: bool = False  # recompute the carrier side instead of using the attached triple
    initial_value: int = 1  # degree assigned on first sight of an interest/relation
    incremental_value: int = 1  # degree added on each repeat sight

    def __post_init__(self):
        if self.spray_margin < 0:
            raise ValueError("spray_margin must be >= 0")
        if self.initial_copies < 1:
            raise ValueError("initial_copies must be >= 1")


class PisRouter(Router):
    name = "pis"

    def __init__(self, config: PisConfig | None = None):
        super().__init__()
        self.config = config or PisConfig()
        self.params = self.config.params
        self.states: dict[int, SlotSocialState] = {}
        self._triple_cache: dict[tuple[int, int], tuple[int, int, SimilarityTriple]] = {}

    @property
    def initial_copies(self):
        return self.config.initial_copies

    def describe(self):
        p = self.params
        return {
            "router": self.name,
            "initial_copies": self.initial_copies,
            "spray_margin": self.config.spray_margin,
            "fresh_peer_sim": self.config.fresh_peer_sim,
            "initial_value": self.config.initial_value,
            "incremental_value": self.config.incremental_value,
            "self_weight": p.self_weight,
            "slot_decay": p.slot_decay,
            "lookback": p.lookback,
            "weight_proximity": p.weight_proximity,
            "weight_interest": p.weight_interest,
            "weight_social": p.weight_social,
            "squared_decay": p.squared_decay,
            "include_direct_tie": p.include_direct_tie,
        }

    def bind(self, engine):
        super().bind(engine)
        profiles = engine.profiles
        self.states = {
            node_id: SlotSocialState(
                node_id,
                engine.clock.slots_per_cycle,
                self_interest=profiles.interests_of(node_id),
                direct_friends=profiles.friends_of(node_id),
                initial_value=self.config.initial_value,
                incremental_value=self.config.incremental_value,
            )
            for node_id in range(engine.node_count)
        }
        self._triple_cache.clear()

    def on_contact_state(self, node_a, node_b, now):
        slot = self.engine.clock.slot_of(now)
        sa = self.states[node_a.id]
        sb = self.states[node_b.id]
        sa.record_contact(node_b.id, slot)
        sb.record_contact(node_a.id, slot)
        # exchanged lists reflect the just-recorded encounter
        sa.merge_peer_contact_list(node_b.id, sb.contact_list[slot], slot)
        sb.merge_peer_contact_list(node_a.id, sa.contact_list[slot], slot)
        sa.update_contact_interest(sb.self_interest, slot)
        sb.update_contact_interest(sa.self_interest, slot)
        sa.update_indirect_social(node_b.id, sb.direct_friends, slot)
        sb.update_indirect_social(node_a.id, sa.direct_friends, slot)

    def triple_toward(self, node_id: int, dst: int, now: float) -> SimilarityTriple:
        """This node's similarity triple toward dst, cached per state version."""
        state = self.states[node_id]
        slot = self.engine.clock.slot_of(now)
        key = (node_id, dst)
        hit = self._triple_cache.get(key)
        if hit is not None and hit[0] == state.version and hit[1] == slot:
            return hit[2]
        profiles = self.engine.profiles
        triple = compute_triple(
            state,
            dst,
            profiles.interests_of(dst),
            profiles.friends_of(dst),
            self.engine.clock,
            now,
            self.params,
        )
        self._triple_cache[key] = (state.version, slot, triple)
        return triple

    def on_replica_received(self, node, replica: Message, now: float):
        replica.attached_sim = self.triple_toward(node.id, replica.dst, now)

    def on_message_created(self, node, replica: Message, now: float):
        # a fresh message carries no triple; the source side is computed on
        # demand at its first encounter
        replica.attached_sim = None

    def _decide(self, sender, receiver, replica: Message, now: float) -> Optional[str]:
        candidate = self.triple_toward(receiver.id, replica.dst, now)
        carrier = replica.attached_sim
        if carrier is None or self.config.fresh_peer_sim:
            carrier = self.triple_toward(sender.id, replica.dst, now)
        utility = sim_pis(
            sim_dev(candidate.pro, carrier.pro),
            sim_dev(candidate.ins, carrier.ins),
            sim_dev(candidate.soc, carrier.soc),
            self.params,
        )
        if replica.nof_copy > 1:
            if utility + self.config.spray_margin > 0:
                return SPLIT
        elif utility > 0:
            return HANDOFF
        return None
