"""Deterministic synthetic fixtures: community-structured contact traces
with daily rhythm, matching profile files, and tiny raw-format samples for
the converters.

Contacts are drawn hour by hour: each candidate pair meets at most once per
hour with a probability that depends on the hour of day, and every meeting
lasts 60-120 s.  Everything is driven by a fixed per-fixture seed, so
regenerated fixtures are byte-identical.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Callable

from .ingest import (
    NormalizedTrace,
    ProfileStore,
    parse_profiles_text,
    serialize_trace,
)
from .model import ContactEvent

HOUR = 3600.0

RateFn = Callable[[int, int, int], float]  # (node_a, node_b, hour_of_day) -> prob


def _hourly_contacts(
    seed: int,
    n_nodes: int,
    duration: float,
    rate: RateFn,
    meet_lo: float = 60.0,
    meet_hi: float = 120.0,
) -> NormalizedTrace:
    rng = random.Random(seed)
    pairs = [(a, b) for a in range(n_nodes) for b in range(a + 1, n_nodes)]
    events = []
    for h in range(int(duration // HOUR)):
        hour_start = h * HOUR
        hour_of_day = h % 24
        for a, b in pairs:
            p = rate(a, b, hour_of_day)
            if p <= 0.0:
                continue
            if rng.random() >= p:
                continue
            # meetings stay inside their hour, so one pair never overlaps itself
            start = hour_start + rng.uniform(0.0, HOUR - meet_hi - 10.0)
            length = rng.uniform(meet_lo, meet_hi)
            events.append(ContactEvent(start, a, b, True))
            events.append(ContactEvent(start + length, a, b, False))
    events.sort(key=lambda ev: (ev.time, ev.a, ev.b, ev.up))
    return NormalizedTrace(n_nodes, duration, tuple(events))


# -- 10-node fixture ---------------------------------------------------------

TEN_NODE_PROFILES = """\
# two interest groups with a couple of cross links
0 | music,films | 1,2,3,4,9
1 | music,hiking | 0,2,3,4
2 | music,photography | 0,1,3,4,lang:es
3 | music | 0,1,2,4
4 | music,cycling | 0,1,2,3,5
5 | sports,cycling | 4,6,7,8,9
6 | sports,chess | 5,7,8,9
7 | sports,photography | 5,6,8,9,lang:es
8 | sports | 5,6,7,9
9 | sports,films | 5,6,7,8,0
"""


def _ten_node_rate(a: int, b: int, hour: int) -> float:
    same_group = (a < 5) == (b < 5)
    if same_group:
        return 0.55 if 7 <= hour < 23 else 0.15
    pair = (min(a, b), max(a, b))
    if pair == (4, 5):
        return 0.45 if 8 <= hour < 20 else 0.0
    if pair == (0, 9):
        return 0.25 if 10 <= hour < 16 else 0.0
    return 0.0


def ten_node_fixture(duration: float = 144_000.0) -> tuple[NormalizedTrace, ProfileStore]:
    trace = _hourly_contacts(20_101, 10, duration, _ten_node_rate)
    profiles = parse_profiles_text(TEN_NODE_PROFILES, known_ids=range(10))
    return trace, profiles


# -- 20-node community fixture ------------------------------------------------

_TOPICS = ("alpha", "beta", "gamma", "delta")
_BRIDGES = {(4, 5), (9, 10), (14, 15), (0, 19)}
_SIDE_BRIDGES = {(3, 6), (8, 11), (13, 16), (1, 18)}


def _community(n: int) -> int:
    return n // 5


def twenty_node_profile_text() -> str:
    lines = ["# four interest communities, ring-bridged"]
    partner = {}
    for a, b in _BRIDGES:
        partner[a] = b
        partner[b] = a
    friend_sets: dict[int, set[int]] = {n: set() for n in range(20)}
    for n in range(20):
        c = _community(n)
        friend_sets[n].update(m for m in range(c * 5, c * 5 + 5) if m != n)
    for a, b in sorted(_BRIDGES | _SIDE_BRIDGES):
        friend_sets[a].add(b)
        friend_sets[b].add(a)
    for n in range(20):
        topics = [_TOPICS[_community(n)]]
        if n in partner:
            # a bridge node also follows the community it crosses into
            topics.append(_TOPICS[_community(partner[n])])
        friends = ",".join(str(m) for m in sorted(friend_sets[n]))
        lines.append(f"{n} | {','.join(topics)} | {friends}")
    return "\n".join(lines) + "\n"


def _twenty_node_rate(a: int, b: int, hour: int) -> float:
    if _community(a) == _community(b):
        return 0.95 if 6 <= hour < 22 else 0.5
    pair = (min(a, b), max(a, b))
    if pair in _BRIDGES:
        return 0.8 if 7 <= hour < 21 else 0.0
    if pair in _SIDE_BRIDGES:
        return 0.6 if 8 <= hour < 18 else 0.0
    return 0.30


def twenty_node_fixture(duration: float = 144_000.0) -> tuple[NormalizedTrace, ProfileStore]:
    # long, frequent gatherings: communities spend much of each daytime hour
    # together, which is what separates flooding's relay count from
    # budget-bound strategies on so few nodes
    trace = _hourly_contacts(20_202, 20, duration, _twenty_node_rate, 900.0, 1500.0)
    profiles = parse_profiles_text(twenty_node_profile_text(), known_ids=range(20))
    return trace, profiles


# -- raw converter samples -----------------------------------------------------

SIGHTINGS_SAMPLE = """\
# time;scanner;seen
60;23;42
180;23;42
300;23;42
900;23;42
60;7;23
1500;42;7
"""

INTERVALS_SAMPLE = """\
# node_a node_b start end
101 102 0 300
101 102 250 500
101 103 100 200
102 103 1000 1200
"""


def write_fixtures(outdir) -> list[Path]:
    """Write every shipped fixture file; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    trace10, _ = ten_node_fixture()
    trace20, _ = twenty_node_fixture()
    files = {
        "trace10.txt": serialize_trace(trace10),
        "profiles10.txt": TEN_NODE_PROFILES,
        "trace20.txt": serialize_trace(trace20),
        "profiles20.txt": twenty_node_profile_text(),
        "sample_sigcomm09.csv": SIGHTINGS_SAMPLE,
        "sample_infocom06.txt": INTERVALS_SAMPLE,
    }
    written = []
    for name, text in files.items():
        path = outdir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
