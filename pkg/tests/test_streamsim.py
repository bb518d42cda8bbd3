"""Tests for streamsim.py: log loading, timeline compression, replay, synthetic logs."""

import random
from datetime import UTC, datetime, timedelta

import pytest

from prefixalign.alignment import build_spn
from prefixalign.exceptions import CliError, LogFormatError, TopicClosedError
from prefixalign.process_tree import parse, to_wfnet
from prefixalign.search import shortest_path
from prefixalign.streamsim import (
    MAX_SPEED,
    REAL_TIME,
    Event,
    EventLog,
    apply_noise,
    compress_timeline,
    generate_synthetic,
    load_log,
    replay,
    write_log_csv,
)
from prefixalign.topic import Topic

T0 = datetime(2024, 1, 1, tzinfo=UTC)


def _csv(tmp_path, text, name="log.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class _ListTopic:
    def __init__(self):
        self.events = []

    def produce(self, event):
        self.events.append(event)


class _FakeClock:
    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def clock(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


# ---------------------------------------------------------------------------
# load_log
# ---------------------------------------------------------------------------


class TestLoadLog:
    def test_sorted_by_timestamp_with_stream_positions(self, tmp_path):
        path = _csv(
            tmp_path,
            "case,activity,timestamp\n"
            "c2,b,2024-01-01T10:02:00Z\n"
            "c1,a,2024-01-01T10:00:00Z\n"
            "c2,a,2024-01-01T10:01:00+00:00\n",
        )
        log = load_log(path)
        assert [(e.case_id, e.activity) for e in log.events] == [
            ("c1", "a"),
            ("c2", "a"),
            ("c2", "b"),
        ]
        assert [e.seq for e in log.events] == [0, 1, 2]
        assert log.traces() == {"c1": ["a"], "c2": ["a", "b"]}

    def test_equal_timestamps_keep_file_order(self, tmp_path):
        path = _csv(
            tmp_path,
            "case,activity,timestamp\nc1,x,2024-01-01T10:00:00Z\nc1,y,2024-01-01T10:00:00Z\n",
        )
        assert load_log(path).traces()["c1"] == ["x", "y"]

    def test_rows_without_case_are_counted(self, tmp_path, capsys):
        path = _csv(
            tmp_path,
            "case,activity,timestamp\n,a,2024-01-01T10:00:00Z\nc1,a,2024-01-01T10:00:00Z\n",
        )
        log = load_log(path)
        assert log.rejected == 1
        assert len(log) == 1
        assert "[WARN]" in capsys.readouterr().err

    def test_header_is_case_insensitive(self, tmp_path):
        path = _csv(tmp_path, "Case, Activity ,TIMESTAMP\nc1,a,2024-01-01T10:00:00Z\n")
        assert len(load_log(path)) == 1

    def test_missing_column(self, tmp_path):
        path = _csv(tmp_path, "case,activity\nc1,a\n")
        with pytest.raises(LogFormatError, match="timestamp"):
            load_log(path)

    def test_bad_timestamp_reports_row(self, tmp_path):
        path = _csv(
            tmp_path,
            "case,activity,timestamp\nc1,a,2024-01-01T10:00:00Z\nc1,b,yesterday\n",
        )
        with pytest.raises(LogFormatError) as exc_info:
            load_log(path)
        assert exc_info.value.row == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(LogFormatError, match="not found"):
            load_log(str(tmp_path / "missing.csv"))

    def test_empty_log(self, tmp_path):
        with pytest.raises(LogFormatError, match="empty log"):
            load_log(_csv(tmp_path, "case,activity,timestamp\n"))

    def test_unknown_format(self, tmp_path):
        with pytest.raises(LogFormatError, match="Unknown log format"):
            load_log(_csv(tmp_path, "x"), "json")

    def test_xes(self, tmp_path):
        path = _csv(
            tmp_path,
            """<?xml version="1.0" encoding="UTF-8"?>
<log xmlns="http://www.xes-standard.org/">
  <trace>
    <string key="concept:name" value="c1"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2024-01-01T10:00:00.000+00:00"/>
    </event>
    <event>
      <string key="concept:name" value="b"/>
      <date key="time:timestamp" value="2024-01-01T10:05:00.000+00:00"/>
    </event>
  </trace>
</log>
""",
            name="log.xes",
        )
        assert load_log(path, "xes").traces() == {"c1": ["a", "b"]}

    def test_written_csv_loads_back(self, tmp_path, table1_log):
        path = str(tmp_path / "out.csv")
        write_log_csv(table1_log, path)
        loaded = load_log(path)
        assert [(e.case_id, e.activity, e.timestamp) for e in loaded.events] == [
            (e.case_id, e.activity, e.timestamp) for e in table1_log.events
        ]


# ---------------------------------------------------------------------------
# compress_timeline
# ---------------------------------------------------------------------------


class TestCompressTimeline:
    def test_endpoints(self, table1_log):
        schedule = compress_timeline(table1_log, 600.0)
        assert schedule.offsets[0] == 0.0
        assert schedule.offsets[-1] == pytest.approx(600.0)

    def test_preserves_ratios(self):
        rng = random.Random(42)
        for _ in range(100):
            gaps = sorted(rng.randint(0, 86_400) for _ in range(rng.randint(3, 30)))
            if gaps[-1] == gaps[0]:
                continue
            events = [Event("c", "a", T0 + timedelta(seconds=g), i) for i, g in enumerate(gaps)]
            target = rng.uniform(1, 1000)
            offsets = compress_timeline(EventLog(events), target).offsets
            span = gaps[-1] - gaps[0]
            for i in range(1, len(gaps)):
                original = (gaps[i] - gaps[0]) / span
                assert offsets[i] / target == pytest.approx(original, abs=1e-9)

    def test_zero_span(self):
        log = EventLog([Event("c", "a", T0, 0), Event("c", "b", T0, 1)])
        assert compress_timeline(log, 10).offsets == (0.0, 0.0)

    def test_target_must_be_positive(self, table1_log):
        with pytest.raises(CliError):
            compress_timeline(table1_log, 0)


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


class TestReplay:
    def test_max_speed_produces_in_order(self, table1_log):
        topic = _ListTopic()
        assert replay(compress_timeline(table1_log, 1), table1_log, topic, MAX_SPEED) == 4
        assert topic.events == table1_log.events

    def test_real_time_waits_for_offsets(self, table1_log):
        fake = _FakeClock()
        topic = _ListTopic()
        schedule = compress_timeline(table1_log, 3.0)
        replay(schedule, table1_log, topic, REAL_TIME, clock=fake.clock, sleep=fake.sleep)
        assert fake.sleeps == pytest.approx([1.0, 1.0, 1.0])
        assert len(topic.events) == 4

    def test_unknown_mode(self, table1_log):
        with pytest.raises(CliError):
            replay(compress_timeline(table1_log, 1), table1_log, _ListTopic(), "warp")

    def test_empty_schedule_is_noop(self):
        empty = EventLog()
        fake = _FakeClock()
        topic = _ListTopic()
        for mode in (MAX_SPEED, REAL_TIME):
            schedule = compress_timeline(empty, 2.0)
            assert replay(schedule, empty, topic, mode, sleep=fake.sleep) == 0
        assert topic.events == []
        assert fake.sleeps == []

    def test_topic_closed_mid_replay(self, table1_log):
        fake = _FakeClock()
        topic = Topic(1)

        def sleep_then_close(seconds):
            fake.sleep(seconds)
            topic.close()

        schedule = compress_timeline(table1_log, 3.0)
        with pytest.raises(TopicClosedError):
            replay(
                schedule, table1_log, topic, REAL_TIME, clock=fake.clock, sleep=sleep_then_close
            )
        assert topic.produced == [1]


# ---------------------------------------------------------------------------
# Synthetic logs
# ---------------------------------------------------------------------------


class TestSynthetic:
    def test_deterministic_under_seed(self):
        first = generate_synthetic("seq(a, xor(b, c), and(d, e))", 20, 0.3, seed=5)
        second = generate_synthetic("seq(a, xor(b, c), and(d, e))", 20, 0.3, seed=5)
        assert first.events == second.events

    def test_case_ids_and_timestamps(self):
        log = generate_synthetic("seq(a, b)", 12, 0.0, seed=0)
        assert sorted(log.traces()) == [f"c{i:02d}" for i in range(1, 13)]
        assert log.events[0].case_id == "c01"
        timestamps = [e.timestamp for e in log.events]
        assert timestamps == sorted(timestamps)

    def test_noise_free_traces_fit_the_model(self):
        tree = parse("seq(a, xor(b, c), loop(d, e), and(f, g))")
        model = to_wfnet(tree)
        log = generate_synthetic(tree, 30, 0.0, seed=2)
        for trace in log.traces().values():
            assert shortest_path(build_spn(model, trace), mode="full").total_cost == 0

    def test_no_cases(self):
        with pytest.raises(CliError, match="empty log"):
            generate_synthetic("a", 0, 0.0, seed=0)

    def test_invalid_tree(self):
        with pytest.raises(CliError, match="Invalid process tree"):
            generate_synthetic("seq(a", 3, 0.0, seed=0)


class TestApplyNoise:
    def test_zero_noise_is_identity(self):
        trace = list("abcdef")
        assert apply_noise(trace, 0.0, random.Random(0), "abcdef") == trace

    def test_full_noise_changes_traces(self):
        rng = random.Random(1)
        changed = sum(
            apply_noise(list("abcdef"), 1.0, rng, "abcdef") != list("abcdef") for _ in range(20)
        )
        assert changed > 0

    def test_only_model_labels_inserted(self):
        rng = random.Random(3)
        for _ in range(50):
            noisy = apply_noise(list("abc"), 0.8, rng, "abc")
            assert set(noisy) <= set("abc")
