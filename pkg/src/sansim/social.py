"""Per-node, per-slot social memory and the encounter-time update procedures.

Each node keeps, for every slot-of-day, a contact list, an ego matrix of
contact frequencies, accumulated contact-interest degrees and indirect
social-relationship degrees.  The self-interest set and the direct friend
set are static profile data shared by all slots.  Counts accumulate across
days with no decay; recency weighting is applied later by the similarity
functions, not here.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .model import InterestId, NodeId


class SlotSocialState:
    """Social memory of one node, indexed by slot-of-day."""

    __slots__ = (
        "owner",
        "slots_per_cycle",
        "self_interest",
        "direct_friends",
        "initial_value",
        "incremental_value",
        "contact_list",
        "ego",
        "contact_interest",
        "indirect_social",
        "version",
    )

    def __init__(
        self,
        owner: NodeId,
        slots_per_cycle: int,
        self_interest: Iterable[InterestId] = (),
        direct_friends: Iterable[NodeId] = (),
        initial_value: int = 1,
        incremental_value: int = 1,
    ):
        self.owner = owner
        self.slots_per_cycle = slots_per_cycle
        self.self_interest = frozenset(self_interest)
        self.direct_friends = frozenset(direct_friends) - {owner}
        self.initial_value = initial_value
        self.incremental_value = incremental_value
        # one entry per slot-of-day, accumulated across cycles
        self.contact_list: list[dict[NodeId, int]] = [{} for _ in range(slots_per_cycle)]
        self.ego: list[dict[NodeId, dict[NodeId, int]]] = [
            {} for _ in range(slots_per_cycle)
        ]
        self.contact_interest: list[dict[InterestId, int]] = [
            {} for _ in range(slots_per_cycle)
        ]
        self.indirect_social: list[dict[NodeId, int]] = [
            {} for _ in range(slots_per_cycle)
        ]
        self.version = 0  # bumped on every mutation; lets callers cache reads

    def _ego_set(self, slot: int, x: NodeId, y: NodeId, degree: int):
        ego = self.ego[slot]
        ego.setdefault(x, {})[y] = degree
        ego.setdefault(y, {})[x] = degree

    def record_contact(self, peer: NodeId, slot: int):
        """Count one encounter with peer in this slot and mirror it into the ego matrix."""
        if peer == self.owner:
            raise ValueError(f"node {self.owner} cannot contact itself")
        cl = self.contact_list[slot]
        cl[peer] = cl.get(peer, 0) + 1
        self._ego_set(slot, self.owner, peer, cl[peer])
        self.version += 1

    def merge_peer_contact_list(
        self, peer: NodeId, peer_contacts: Mapping[NodeId, int], slot: int
    ):
        """Fold the peer's exchanged contact list into the ego matrix.

        Entries overwrite: a later report from the same peer refreshes stale
        third-party degrees to the reporter's latest count.
        """
        for c, degree in peer_contacts.items():
            self._ego_set(slot, c, peer, degree)
        self.version += 1

    def update_contact_interest(self, peer_self_interest: Iterable[InterestId], slot: int):
        """Accumulate the peer's self-interests into this slot's contact interests."""
        ci = self.contact_interest[slot]
        for ins in peer_self_interest:
            if ins in ci:
                ci[ins] += self.incremental_value
            else:
                ci[ins] = self.initial_value
        self.version += 1

    def update_indirect_social(
        self, peer: NodeId, peer_direct: Iterable[NodeId], slot: int
    ):
        """Accumulate friends-of-friends gossip; direct relations dominate."""
        inso = self.indirect_social[slot]
        for friend in peer_direct:
            if friend == self.owner or friend in self.direct_friends:
                continue
            if friend in inso:
                inso[friend] += self.incremental_value
            else:
                inso[friend] = self.initial_value
        self.version += 1
