"""
Shared test fixtures for prefixalign tests.
Patches the config module so tests never read a real .env, and provides the
small reference net and the two-case stream most tests are built on.
"""

from datetime import UTC, datetime, timedelta

import pytest

from prefixalign.petri import WFNet
from prefixalign.streamsim import Event, EventLog

T0 = datetime(2024, 1, 1, 9, 0, tzinfo=UTC)


@pytest.fixture(autouse=True)
def _isolate_config(monkeypatch):
    """Every test starts from defaults, with replay checks on."""
    from prefixalign import config

    monkeypatch.setattr(config, "env", {})
    monkeypatch.setattr(config, "VARIANT", config.DEFAULT_VARIANT)
    monkeypatch.setattr(config, "PARTITIONS", config.DEFAULT_PARTITIONS)
    monkeypatch.setattr(config, "WORKERS", config.DEFAULT_WORKERS)
    monkeypatch.setattr(config, "CACHE_CAPACITY", config.DEFAULT_CACHE_CAPACITY)
    monkeypatch.setattr(config, "CACHE_POLICY", config.DEFAULT_CACHE_POLICY)
    monkeypatch.setattr(config, "HEURISTIC", config.DEFAULT_HEURISTIC)
    monkeypatch.setattr(config, "MAX_RECORDS", config.DEFAULT_MAX_RECORDS)
    monkeypatch.setattr(config, "MAX_AGGREGATES", 0)
    monkeypatch.setattr(config, "LAG_SAMPLE_MS", config.DEFAULT_LAG_SAMPLE_MS)
    monkeypatch.setattr(config, "SEED", 0)
    monkeypatch.setattr(config, "OUT_DIR", "out")
    monkeypatch.setattr(config, "EVENT_LOG_ENABLED", False)
    monkeypatch.setattr(config, "EVENT_LOG_SAMPLE_RATE", 1.0)
    monkeypatch.setattr(config, "DEBUG_CHECKS", True)
    monkeypatch.setattr(config, "RUNTIME_QUIET", False)
    monkeypatch.setattr(config, "RUNTIME_VERBOSE", False)
    yield


def build_n1() -> WFNet:
    """p1 -a/tau-> p2 -b/c-> p3 with transitions t1(a), t2(tau), t3(b), t4(c)."""
    net = WFNet("n1")
    p1, p2, p3 = net.add_place("p1"), net.add_place("p2"), net.add_place("p3")
    for name, label, src, dst in (
        ("t1", "a", p1, p2),
        ("t2", None, p1, p2),
        ("t3", "b", p2, p3),
        ("t4", "c", p2, p3),
    ):
        t = net.add_transition(name, label)
        net.add_arc(src, t)
        net.add_arc(t, dst)
    net.source, net.sink = p1, p3
    net.freeze()
    return net


@pytest.fixture
def n1():
    return build_n1()


@pytest.fixture
def n1_pnml(tmp_path, n1):
    from prefixalign.pnml import write_model

    path = tmp_path / "n1.pnml"
    write_model(n1, str(path))
    return str(path)


TABLE1_STREAM = (("c1", "a"), ("c2", "a"), ("c2", "b"), ("c1", "b"))


@pytest.fixture
def table1_log():
    events = [
        Event(case, activity, T0 + timedelta(minutes=i), i)
        for i, (case, activity) in enumerate(TABLE1_STREAM)
    ]
    return EventLog(events)


@pytest.fixture
def table1_csv(tmp_path):
    path = tmp_path / "table1.csv"
    lines = ["case,activity,timestamp"]
    for i, (case, activity) in enumerate(TABLE1_STREAM):
        lines.append(f"{case},{activity},2024-01-01T09:0{i}:00Z")
    path.write_text("\n".join(lines) + "\n")
    return str(path)
