"""Similarity of a node toward a destination, per social dimension, plus the
pairwise deviation and the combined forwarding utility.

Each dimension is a decay-weighted sum over a lookback window of slot-of-day
indices starting at the current slot.  The weight of window position t is
slot_decay**(t+1), so nearer slots dominate.  Interest and social similarity
each blend a static profile part (self-interests, direct friends) with the
accumulated gossip part (contact interests, indirect relations) using
self_weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import AbstractSet, Mapping

from .model import InterestId, NodeId, SimilarityTriple, SlotClock
from .social import SlotSocialState

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SimilarityParams:
    """Tuning knobs of the similarity pipeline.

    self_weight blends the static-profile part against the gossip part of
    the interest and social dimensions; slot_decay discounts farther window
    positions; lookback is the window length in slots; the three weight_*
    fields combine the per-dimension deviations and must sum to 1.
    squared_decay squares the decay factor at each window step instead of
    multiplying it in (weights decay**(2**t) rather than decay**(t+1)),
    kept for sensitivity runs.  include_direct_tie additionally credits the
    node's own ego-matrix tie to the destination in the proximity sum.
    """

    self_weight: float = 0.5
    slot_decay: float = 0.8
    lookback: int = 6
    weight_proximity: float = 1.0 / 3.0
    weight_interest: float = 1.0 / 3.0
    weight_social: float = 1.0 / 3.0
    squared_decay: bool = False
    include_direct_tie: bool = False

    def __post_init__(self):
        if not 0.0 <= self.self_weight <= 1.0:
            raise ValueError("self_weight must lie in [0, 1]")
        if not 0.0 < self.slot_decay < 1.0:
            raise ValueError("slot_decay must lie in (0, 1)")
        if self.lookback < 1:
            raise ValueError("lookback must be >= 1")
        wsum = self.weight_proximity + self.weight_interest + self.weight_social
        if min(self.weight_proximity, self.weight_interest, self.weight_social) < 0:
            raise ValueError("dimension weights must be non-negative")
        if not math.isclose(wsum, 1.0, abs_tol=WEIGHT_SUM_TOL):
            raise ValueError(f"dimension weights must sum to 1, got {wsum!r}")

    def slot_weights(self) -> tuple[float, ...]:
        """Decay weight for each window position t in [0, lookback)."""
        if self.squared_decay:
            return tuple(self.slot_decay ** (2**t) for t in range(self.lookback))
        return tuple(self.slot_decay ** (t + 1) for t in range(self.lookback))


def sim_pro_slot(
    ego_slot: Mapping[NodeId, Mapping[NodeId, int]],
    self_id: NodeId,
    dst: NodeId,
    include_direct_tie: bool = False,
) -> float:
    """Proximity similarity contribution of one slot.

    Sums, over nodes adjacent to both self and dst in the slot's ego matrix,
    the matrix degree between the common node and the destination: the
    node's local estimate of that neighbour's tie to dst.
    """
    mine = ego_slot.get(self_id)
    theirs = ego_slot.get(dst)
    total = 0
    if mine and theirs:
        for c in mine.keys() & theirs.keys():
            total += theirs[c]
    if include_direct_tie and mine:
        total += mine.get(dst, 0)
    return float(total)


def _window(state: SlotSocialState, clock: SlotClock, now: float, params: SimilarityParams):
    slots = clock.lookback_slots(clock.slot_of(now), params.lookback)
    return zip(slots, params.slot_weights())


def sim_pro(
    state: SlotSocialState,
    dst: NodeId,
    clock: SlotClock,
    now: float,
    params: SimilarityParams,
) -> float:
    """Decay-weighted proximity similarity toward dst over the lookback window."""
    total = 0.0
    for slot, w in _window(state, clock, now, params):
        total += w * sim_pro_slot(
            state.ego[slot], state.owner, dst, params.include_direct_tie
        )
    return total


def sim_ins(
    state: SlotSocialState,
    dst_interests: AbstractSet[InterestId],
    clock: SlotClock,
    now: float,
    params: SimilarityParams,
) -> float:
    """Interest similarity: self-interest overlap blended with contact-interest degrees."""
    overlap = len(state.self_interest & dst_interests)
    self_part = 0.0
    contact_part = 0.0
    for slot, w in _window(state, clock, now, params):
        self_part += w * overlap
        ci = state.contact_interest[slot]
        contact_part += w * sum(ci.get(ins, 0) for ins in dst_interests)
    a = params.self_weight
    return a * self_part + (1.0 - a) * contact_part


def sim_soc(
    state: SlotSocialState,
    dst: NodeId,
    dst_friends: AbstractSet[NodeId],
    clock: SlotClock,
    now: float,
    params: SimilarityParams,
) -> float:
    """Social similarity: common friends (a direct friendship with dst itself
    counts as one membership) blended with indirect-relation degrees toward
    the destination's friends."""
    base = len(state.direct_friends & dst_friends)
    if dst in state.direct_friends:
        base += 1
    direct_part = 0.0
    indirect_part = 0.0
    for slot, w in _window(state, clock, now, params):
        direct_part += w * base
        inso = state.indirect_social[slot]
        indirect_part += w * sum(inso.get(f, 0) for f in dst_friends)
    a = params.self_weight
    return a * direct_part + (1.0 - a) * indirect_part


def compute_triple(
    state: SlotSocialState,
    dst: NodeId,
    dst_interests: AbstractSet[InterestId],
    dst_friends: AbstractSet[NodeId],
    clock: SlotClock,
    now: float,
    params: SimilarityParams,
) -> SimilarityTriple:
    """All three similarities of state's owner toward dst at time now."""
    return SimilarityTriple(
        pro=sim_pro(state, dst, clock, now, params),
        ins=sim_ins(state, dst_interests, clock, now, params),
        soc=sim_soc(state, dst, dst_friends, clock, now, params),
    )


def sim_dev(x_a: float, x_b: float) -> float:
    """Relative deviation (x_a - x_b)/(x_a + x_b) in [-1, 1].

    Defined as 0 when both sides are 0: no information, no preference.
    """
    denom = x_a + x_b
    if denom == 0.0:
        return 0.0
    return (x_a - x_b) / denom


def sim_pis(
    dev_pro: float, dev_ins: float, dev_soc: float, params: SimilarityParams
) -> float:
    """Convex combination of the three deviations; the forwarding utility.

    Clamped to [-1, 1] to absorb float roundoff at the extremes; the exact
    value is a convex combination of numbers in that range.
    """
    v = (
        params.weight_proximity * dev_pro
        + params.weight_interest * dev_ins
        + params.weight_social * dev_soc
    )
    return min(1.0, max(-1.0, v))
