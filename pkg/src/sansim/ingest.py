"""Trace and profile ingestion.

Normalized trace format (UTF-8 text, canonical form):

    # nodes=10 duration=144000
    0 3 7 up
    118 3 7 down
    ...

Header lines start with ``#`` and carry ``key=value`` tokens (``nodes`` and
``duration`` required, ``epoch`` optional).  Records are
``time node_a node_b {up|down}``, sorted by time, node ids dense in
[0, nodes).  Times serialize without a trailing ``.0`` when integral, so
serialize(parse(file)) is byte-identical for files in canonical form.

Profile format, one record per node:

    4 | music,hiking | 2,9,lang:fr

Field two lists interest tags, field three friend node ids; ``lang:TAG``
tokens expand to pairwise friendship among every node sharing the tag.

Converters accept two raw layouts: semicolon-separated proximity sightings
``time;scanner;seen`` (coalesced into contact intervals) and whitespace
interval rows ``node_a node_b start end``.  Anything else fails loudly with
the offending line number.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import ContactEvent, InterestId, NodeId

SIGHTING_PERIOD = 120.0  # nominal seconds between proximity samples
DEFAULT_GAP_THRESHOLD = 260.0  # two missed sampling periods

TRACE_FORMATS = ("normalized", "sigcomm09", "infocom06")


class IngestError(ValueError):
    """Malformed input; message carries the file line when known."""


@dataclass(frozen=True)
class NormalizedTrace:
    node_count: int
    duration: float
    events: tuple[ContactEvent, ...] = ()
    epoch: Optional[int] = None

    def __post_init__(self):
        last = None
        open_pairs = set()
        for i, ev in enumerate(self.events):
            if not 0 <= ev.a < self.node_count or not 0 <= ev.b < self.node_count:
                raise IngestError(f"event {i}: node id outside [0, {self.node_count})")
            if last is not None and ev.time < last:
                raise IngestError(f"event {i}: time {ev.time} before {last}")
            last = ev.time
            pair = (min(ev.a, ev.b), max(ev.a, ev.b))
            if ev.up:
                if pair in open_pairs:
                    raise IngestError(f"event {i}: pair {pair} already up")
                open_pairs.add(pair)
            else:
                if pair not in open_pairs:
                    raise IngestError(f"event {i}: pair {pair} not up")
                open_pairs.discard(pair)


def _fmt_time(t: float) -> str:
    if t == int(t):
        return str(int(t))
    return repr(t)


def serialize_trace(trace: NormalizedTrace) -> str:
    header = f"# nodes={trace.node_count} duration={_fmt_time(trace.duration)}"
    if trace.epoch is not None:
        header += f" epoch={trace.epoch}"
    lines = [header]
    for ev in trace.events:
        state = "up" if ev.up else "down"
        lines.append(f"{_fmt_time(ev.time)} {ev.a} {ev.b} {state}")
    return "\n".join(lines) + "\n"


def _parse_normalized(text: str) -> NormalizedTrace:
    node_count = None
    duration = None
    epoch = None
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" not in token:
                    continue
                key, _, value = token.partition("=")
                try:
                    if key == "nodes":
                        node_count = int(value)
                    elif key == "duration":
                        duration = float(value)
                    elif key == "epoch":
                        epoch = int(value)
                except ValueError:
                    raise IngestError(f"line {lineno}: bad header token {token!r}") from None
            continue
        parts = line.split()
        if len(parts) != 4 or parts[3] not in ("up", "down"):
            raise IngestError(f"line {lineno}: expected 'time a b up|down', got {raw!r}")
        try:
            t = float(parts[0])
            a = int(parts[1])
            b = int(parts[2])
        except ValueError:
            raise IngestError(f"line {lineno}: non-numeric field in {raw!r}") from None
        if a == b:
            raise IngestError(f"line {lineno}: node {a} in contact with itself")
        events.append(ContactEvent(t, a, b, parts[3] == "up"))
    if node_count is None or duration is None:
        raise IngestError("missing '# nodes=N duration=S' header")
    try:
        return NormalizedTrace(node_count, duration, tuple(events), epoch)
    except IngestError:
        raise
    except ValueError as exc:  # self-contact from ContactEvent
        raise IngestError(str(exc)) from None


def _densify(ids: Iterable[int]) -> dict[int, int]:
    return {raw: dense for dense, raw in enumerate(sorted(set(ids)))}


def _intervals_to_trace(
    intervals: dict[tuple[int, int], list[tuple[float, float]]],
    id_map: dict[int, int],
) -> NormalizedTrace:
    events = []
    for (ra, rb), spans in intervals.items():
        a, b = id_map[ra], id_map[rb]
        for start, end in spans:
            events.append(ContactEvent(start, a, b, True))
            events.append(ContactEvent(end, a, b, False))
    events.sort(key=lambda ev: (ev.time, ev.a, ev.b, ev.up))
    duration = events[-1].time if events else 0.0
    return NormalizedTrace(len(id_map), duration, tuple(events))


def _coalesce(times: list[float], gap_threshold: float) -> list[tuple[float, float]]:
    """Merge sighting timestamps into contact intervals.

    A run breaks when consecutive sightings are more than gap_threshold
    apart; each run becomes [first, last + SIGHTING_PERIOD] so a lone
    sighting still yields a usable contact.
    """
    spans = []
    times = sorted(times)
    start = prev = times[0]
    for t in times[1:]:
        if t - prev > gap_threshold:
            spans.append((start, prev + SIGHTING_PERIOD))
            start = t
        prev = t
    spans.append((start, prev + SIGHTING_PERIOD))
    return spans


def _parse_sigcomm09(text: str, gap_threshold: float) -> NormalizedTrace:
    sightings: dict[tuple[int, int], list[float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(";")
        if len(parts) != 3:
            raise IngestError(
                f"line {lineno}: expected 'time;scanner;seen', got {raw!r}"
            )
        try:
            t = float(parts[0])
            a = int(parts[1])
            b = int(parts[2])
        except ValueError:
            raise IngestError(f"line {lineno}: non-numeric field in {raw!r}") from None
        if a == b:
            raise IngestError(f"line {lineno}: node {a} sighted itself")
        pair = (min(a, b), max(a, b))
        sightings.setdefault(pair, []).append(t)
    id_map = _densify(n for pair in sightings for n in pair)
    intervals = {
        pair: _coalesce(times, gap_threshold) for pair, times in sightings.items()
    }
    return _intervals_to_trace(intervals, id_map)


def _merge_spans(spans: list[tuple[float, float]]) -> list[tuple[float, float]]:
    spans = sorted(spans)
    merged = [spans[0]]
    for start, end in spans[1:]:
        last_start, last_end = merged[-1]
        if start <= last_end:  # overlapping or touching intervals are one contact
            merged[-1] = (last_start, max(last_end, end))
        else:
            merged.append((start, end))
    return merged


def _parse_infocom06(text: str) -> NormalizedTrace:
    raw_spans: dict[tuple[int, int], list[tuple[float, float]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise IngestError(
                f"line {lineno}: expected 'node_a node_b start end', got {raw!r}"
            )
        try:
            a = int(parts[0])
            b = int(parts[1])
            start = float(parts[2])
            end = float(parts[3])
        except ValueError:
            raise IngestError(f"line {lineno}: non-numeric field in {raw!r}") from None
        if a == b:
            raise IngestError(f"line {lineno}: node {a} in contact with itself")
        if end <= start:
            raise IngestError(f"line {lineno}: interval [{start}, {end}] is empty")
        pair = (min(a, b), max(a, b))
        raw_spans.setdefault(pair, []).append((start, end))
    id_map = _densify(n for pair in raw_spans for n in pair)
    intervals = {pair: _merge_spans(spans) for pair, spans in raw_spans.items()}
    return _intervals_to_trace(intervals, id_map)


def parse_trace(
    path,
    fmt: str = "normalized",
    gap_threshold: float = DEFAULT_GAP_THRESHOLD,
) -> NormalizedTrace:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "normalized":
        return _parse_normalized(text)
    if fmt == "sigcomm09":
        return _parse_sigcomm09(text, gap_threshold)
    if fmt == "infocom06":
        return _parse_infocom06(text)
    raise IngestError(f"unknown trace format {fmt!r}; choices: {TRACE_FORMATS}")


# -- profiles ---------------------------------------------------------------


@dataclass
class ProfileStore:
    """Per-node interest sets (interned to ints) and symmetric friend sets."""

    interests: dict[NodeId, frozenset[InterestId]] = field(default_factory=dict)
    friends: dict[NodeId, frozenset[NodeId]] = field(default_factory=dict)
    interest_names: dict[InterestId, str] = field(default_factory=dict)

    def interests_of(self, node: NodeId) -> frozenset[InterestId]:
        return self.interests.get(node, frozenset())

    def friends_of(self, node: NodeId) -> frozenset[NodeId]:
        return self.friends.get(node, frozenset())

    @property
    def node_ids(self) -> list[NodeId]:
        return sorted(self.interests.keys() | self.friends.keys())


def parse_profiles(path, known_ids: Optional[Iterable[NodeId]] = None) -> ProfileStore:
    with open(path, encoding="utf-8") as fh:
        return parse_profiles_text(fh.read(), known_ids)


def parse_profiles_text(text: str, known_ids: Optional[Iterable[NodeId]] = None) -> ProfileStore:
    known = None if known_ids is None else set(known_ids)
    intern: dict[str, InterestId] = {}
    interests: dict[NodeId, set[InterestId]] = {}
    friends: dict[NodeId, set[NodeId]] = {}
    lang_groups: dict[str, set[NodeId]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise IngestError(
                f"line {lineno}: expected 'node | interests | friends', got {raw!r}"
            )
        try:
            node = int(parts[0])
        except ValueError:
            raise IngestError(f"line {lineno}: bad node id {parts[0]!r}") from None
        if node in interests:
            raise IngestError(f"line {lineno}: duplicate record for node {node}")
        if known is not None and node not in known:
            warnings.warn(f"profile line {lineno}: node {node} not in trace", stacklevel=2)
        ins = set()
        for tag in filter(None, (t.strip() for t in parts[1].split(","))):
            if tag not in intern:
                intern[tag] = len(intern)
            ins.add(intern[tag])
        frs = set()
        for tok in filter(None, (t.strip() for t in parts[2].split(","))):
            if tok.startswith("lang:"):
                lang_groups.setdefault(tok[5:], set()).add(node)
                continue
            try:
                frs.add(int(tok))
            except ValueError:
                raise IngestError(f"line {lineno}: bad friend token {tok!r}") from None
        interests[node] = ins
        friends[node] = frs
    for group in lang_groups.values():
        for node in group:
            friends.setdefault(node, set()).update(group)
    # symmetrize and drop self-edges
    sym: dict[NodeId, set[NodeId]] = {n: set(f) for n, f in friends.items()}
    for node, frs in friends.items():
        for other in frs:
            sym.setdefault(other, set()).add(node)
    store = ProfileStore(interest_names={v: k for k, v in intern.items()})
    all_nodes = set(interests) | set(sym)
    for node in sorted(all_nodes):
        store.interests[node] = frozenset(interests.get(node, ()))
        store.friends[node] = frozenset(sym.get(node, ()) - {node})
    return store


def serialize_profiles(store: ProfileStore) -> str:
    lines = []
    for node in store.node_ids:
        names = sorted(store.interest_names[i] for i in store.interests_of(node))
        frs = sorted(store.friends_of(node))
        lines.append(f"{node} | {','.join(names)} | {','.join(map(str, frs))}")
    return "\n".join(lines) + "\n"
