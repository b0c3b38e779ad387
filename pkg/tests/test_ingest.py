import pytest

from sansim.ingest import (
    IngestError,
    NormalizedTrace,
    ProfileStore,
    parse_profiles_text,
    parse_trace,
    serialize_profiles,
    serialize_trace,
)
from sansim.model import ContactEvent

from conftest import make_trace


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestNormalizedFormat:
    def test_parse_canonical(self, tmp_path):
        p = _write(
            tmp_path,
            "t.txt",
            "# nodes=3 duration=500\n10 0 1 up\n20.5 0 1 down\n30 1 2 up\n",
        )
        trace = parse_trace(p, "normalized")
        assert trace.node_count == 3
        assert trace.duration == 500.0
        assert trace.events == (
            ContactEvent(10.0, 0, 1, True),
            ContactEvent(20.5, 0, 1, False),
            ContactEvent(30.0, 1, 2, True),
        )

    def test_round_trip_is_byte_identical(self, tmp_path):
        text = "# nodes=4 duration=1000\n0 0 3 up\n10.25 0 3 down\n999 1 2 up\n"
        p = _write(tmp_path, "t.txt", text)
        assert serialize_trace(parse_trace(p, "normalized")) == text

    def test_fixture_files_round_trip(self, tmp_path):
        for name in ("fixtures/trace10.txt", "fixtures/trace20.txt"):
            text = open(name, encoding="utf-8").read()
            p = _write(tmp_path, "copy.txt", text)
            assert serialize_trace(parse_trace(p, "normalized")) == text

    def test_epoch_is_preserved(self, tmp_path):
        text = "# nodes=2 duration=100 epoch=1234567890\n5 0 1 up\n"
        p = _write(tmp_path, "t.txt", text)
        trace = parse_trace(p, "normalized")
        assert trace.epoch == 1234567890
        assert serialize_trace(trace) == text

    @pytest.mark.parametrize(
        "body,needle",
        [
            ("# duration=100\n1 0 1 up\n", "nodes"),
            ("# nodes=2 duration=100\n1 0 1 sideways\n", "time a b"),
            ("# nodes=2 duration=100\n1 0 1\n", "line 2"),
            ("# nodes=2 duration=100\n1 0 2 up\n", "outside"),
            ("# nodes=2 duration=100\n5 0 1 up\n3 0 1 down\n", "before"),
            ("# nodes=2 duration=100\n1 1 1 up\n", "itself"),
            ("# nodes=2 duration=100\n1 0 1 down\n", "not up"),
            ("# nodes=2 duration=100\n1 0 1 up\n2 0 1 up\n", "already up"),
        ],
    )
    def test_malformed_inputs_fail_loudly(self, tmp_path, body, needle):
        p = _write(tmp_path, "bad.txt", body)
        with pytest.raises(IngestError, match=needle):
            parse_trace(p, "normalized")

    def test_contact_may_stay_open_at_trace_end(self):
        # real captures often end mid-contact; the engine just never sees
        # the link drop
        make_trace([(1.0, 0, 1, True)], node_count=2, duration=100.0)

    def test_unknown_format_rejected(self, tmp_path):
        p = _write(tmp_path, "t.txt", "# nodes=2 duration=1\n")
        with pytest.raises(IngestError, match="format"):
            parse_trace(p, "one_simulator")


class TestSightingCoalescing:
    def test_documented_sample(self, tmp_path):
        body = "60;23;42\n60;7;23\n180;23;42\n300;23;42\n900;23;42\n1500;42;7\n"
        trace = parse_trace(_write(tmp_path, "s.csv", body), "sigcomm09")
        # ids densify by sorted original id: 7->0, 23->1, 42->2
        assert trace.node_count == 3
        got = [(e.time, e.a, e.b, e.up) for e in trace.events]
        assert got == [
            (60.0, 0, 1, True),
            (60.0, 1, 2, True),
            (180.0, 0, 1, False),
            (420.0, 1, 2, False),
            (900.0, 1, 2, True),
            (1020.0, 1, 2, False),
            (1500.0, 0, 2, True),
            (1620.0, 0, 2, False),
        ]

    def test_gap_threshold_boundary(self, tmp_path):
        body = "100;1;2\n400;1;2\n"
        p = _write(tmp_path, "s.csv", body)
        one = parse_trace(p, "sigcomm09", gap_threshold=300.0)  # 300 s gap: same run
        assert [(e.time, e.up) for e in one.events] == [(100.0, True), (520.0, False)]
        two = parse_trace(p, "sigcomm09", gap_threshold=299.0)
        assert [(e.time, e.up) for e in two.events] == [
            (100.0, True),
            (220.0, False),
            (400.0, True),
            (520.0, False),
        ]

    def test_direction_is_ignored(self, tmp_path):
        # scanner/seen roles flip between samples of one ongoing contact
        body = "100;1;2\n200;2;1\n"
        trace = parse_trace(_write(tmp_path, "s.csv", body), "sigcomm09")
        assert [(e.time, e.up) for e in trace.events] == [(100.0, True), (320.0, False)]

    def test_self_sighting_rejected(self, tmp_path):
        p = _write(tmp_path, "s.csv", "100;5;5\n")
        with pytest.raises(IngestError, match="line 1"):
            parse_trace(p, "sigcomm09")

    def test_field_count_enforced(self, tmp_path):
        p = _write(tmp_path, "s.csv", "100;1;2;999\n")
        with pytest.raises(IngestError, match="line 1"):
            parse_trace(p, "sigcomm09")

    def test_conversion_is_idempotent(self, tmp_path):
        body = "60;23;42\n180;23;42\n900;23;42\n"
        trace = parse_trace(_write(tmp_path, "s.csv", body), "sigcomm09")
        text = serialize_trace(trace)
        again = parse_trace(_write(tmp_path, "n.txt", text), "normalized")
        assert serialize_trace(again) == text


class TestIntervalFormat:
    def test_documented_sample(self, tmp_path):
        body = "101 102 0 300\n101 102 250 500\n101 103 100 200\n102 103 1000 1200\n"
        trace = parse_trace(_write(tmp_path, "i.txt", body), "infocom06")
        assert trace.node_count == 3  # 101->0, 102->1, 103->2
        got = [(e.time, e.a, e.b, e.up) for e in trace.events]
        assert got == [
            (0.0, 0, 1, True),
            (100.0, 0, 2, True),
            (200.0, 0, 2, False),
            (500.0, 0, 1, False),  # overlapping spans merged
            (1000.0, 1, 2, True),
            (1200.0, 1, 2, False),
        ]

    def test_touching_spans_merge(self, tmp_path):
        body = "1 2 0 100\n1 2 100 200\n"
        trace = parse_trace(_write(tmp_path, "i.txt", body), "infocom06")
        assert [(e.time, e.up) for e in trace.events] == [(0.0, True), (200.0, False)]

    def test_empty_interval_rejected(self, tmp_path):
        p = _write(tmp_path, "i.txt", "1 2 100 100\n")
        with pytest.raises(IngestError, match="line 1"):
            parse_trace(p, "infocom06")


class TestProfiles:
    def test_basic_parse_and_interning(self):
        store = parse_profiles_text(
            "0 | music,hiking | 1\n1 | hiking | \n2 | music | 0\n"
        )
        music, hiking = 0, 1  # interned in first-appearance order
        assert store.interests_of(0) == frozenset({music, hiking})
        assert store.interests_of(1) == frozenset({hiking})
        assert store.interest_names == {0: "music", 1: "hiking"}

    def test_friendship_symmetrized(self):
        store = parse_profiles_text("0 |  | 1\n1 |  | \n2 |  | 0\n")
        assert store.friends_of(0) == frozenset({1, 2})
        assert store.friends_of(1) == frozenset({0})
        assert store.friends_of(2) == frozenset({0})

    def test_language_groups_expand_pairwise(self):
        store = parse_profiles_text(
            "0 |  | lang:fr\n1 |  | lang:fr\n2 |  | lang:fr\n3 |  | \n"
        )
        assert store.friends_of(0) == frozenset({1, 2})
        assert store.friends_of(1) == frozenset({0, 2})
        assert store.friends_of(3) == frozenset()

    def test_self_friendship_dropped(self):
        store = parse_profiles_text("0 |  | 0,1\n")
        assert store.friends_of(0) == frozenset({1})

    def test_duplicate_node_is_an_error(self):
        with pytest.raises(IngestError, match="duplicate"):
            parse_profiles_text("0 | a | \n0 | b | \n")

    def test_unknown_node_warns_but_loads(self):
        with pytest.warns(UserWarning, match="node 9"):
            store = parse_profiles_text("0 | a | \n9 | b | \n", known_ids=range(3))
        assert store.interests_of(9)

    def test_missing_profile_defaults_empty(self):
        store = ProfileStore()
        assert store.interests_of(42) == frozenset()
        assert store.friends_of(42) == frozenset()

    def test_round_trip(self):
        text = "0 | hiking,music | 1\n1 |  | 0,2\n2 | music | 1\n"
        store = parse_profiles_text(text)
        again = parse_profiles_text(serialize_profiles(store))
        assert again.friends == store.friends
        # interest ids may be re-interned; compare by name
        for node in store.node_ids:
            assert {store.interest_names[i] for i in store.interests_of(node)} == {
                again.interest_names[i] for i in again.interests_of(node)
            }

    def test_shipped_profiles_parse(self):
        for name, n in (("fixtures/profiles10.txt", 10), ("fixtures/profiles20.txt", 20)):
            store = parse_profiles_text(open(name, encoding="utf-8").read(), range(n))
            assert store.node_ids
            for node in store.node_ids:
                assert node not in store.friends_of(node)
                for f in store.friends_of(node):
                    assert node in store.friends_of(f)
