"""
Event logs and time-compressed stream replay.

CSV logs have the columns ``case,activity,timestamp`` (RFC 3339). XES logs
are read through the standard ``concept:name`` and ``time:timestamp`` keys;
the trace-level ``concept:name`` is the case id.
"""

import csv
import os
import random
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import UTC, datetime, timedelta

from prefixalign import process_tree
from prefixalign._log import log_event, warn
from prefixalign._utils import format_timestamp, parse_timestamp
from prefixalign.exceptions import CliError, LogFormatError

CSV_COLUMNS = ("case", "activity", "timestamp")
REAL_TIME = "real_time"
MAX_SPEED = "max_speed"
NOISE_OPERATIONS = ("swap", "drop", "insert")

SYNTHETIC_START = datetime(2024, 1, 1, tzinfo=UTC)
SYNTHETIC_CASE_GAP = timedelta(seconds=30)
SYNTHETIC_EVENT_GAP = timedelta(seconds=60)


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime
    seq: int = 0


@dataclass
class EventLog:
    events: list[Event] = field(default_factory=list)
    rejected: int = 0
    source: str = ""

    def __len__(self) -> int:
        return len(self.events)

    @property
    def span(self) -> timedelta:
        if not self.events:
            return timedelta(0)
        return self.events[-1].timestamp - self.events[0].timestamp

    def traces(self) -> dict[str, list[str]]:
        """Activities per case in stream order; cases in order of first event."""
        out: dict[str, list[str]] = {}
        for e in self.events:
            out.setdefault(e.case_id, []).append(e.activity)
        return out


@dataclass(frozen=True)
class ReplaySchedule:
    target_duration: float
    offsets: tuple[float, ...] = ()


def _sorted_log(raw: list[Event], rejected: int, source: str) -> EventLog:
    ordered = sorted(raw, key=lambda e: e.timestamp)
    events = [Event(e.case_id, e.activity, e.timestamp, i) for i, e in enumerate(ordered)]
    return EventLog(events, rejected, source)


# ---------------------------------------------------------------------------
# Readers / writers
# ---------------------------------------------------------------------------


def load_log(path, fmt: str = "csv") -> EventLog:
    """Read and sort an event log. Rows without case or activity are counted and skipped."""
    if not os.path.exists(path):
        raise LogFormatError(f"[ERROR] Event log not found: {path}")
    if fmt == "csv":
        log = _read_csv(path)
    elif fmt == "xes":
        log = _read_xes(path)
    else:
        raise LogFormatError(f"[ERROR] Unknown log format '{fmt}'. Valid: csv, xes")
    if log.rejected:
        warn(f"{log.rejected} event(s) without case or activity skipped in {path}")
    if not log.events:
        raise LogFormatError(f"[ERROR] {path}: empty log.")
    return log


def _read_csv(path) -> EventLog:
    raw: list[Event] = []
    rejected = 0
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise LogFormatError(f"[ERROR] {path}: empty log.")
        header = [h.strip().lower() for h in reader.fieldnames]
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise LogFormatError(
                f"[ERROR] {path}: missing column(s) {', '.join(missing)}.",
                recovery_hint="Expected a header row: case,activity,timestamp",
            )
        reader.fieldnames = header
        for row_no, row in enumerate(reader, start=1):
            case_id = (row.get("case") or "").strip()
            activity = (row.get("activity") or "").strip()
            if not case_id or not activity:
                rejected += 1
                continue
            ts = parse_timestamp(row.get("timestamp"))
            if ts is None:
                raise LogFormatError(
                    f"[ERROR] {path}: row {row_no}: unparseable timestamp "
                    f"{row.get('timestamp')!r}.",
                    row=row_no,
                )
            raw.append(Event(case_id, activity, ts))
    return _sorted_log(raw, rejected, str(path))


def _xes_attrs(elem) -> dict[str, str]:
    out = {}
    for child in elem:
        tag = child.tag.rsplit("}", 1)[-1]
        if tag in ("string", "date") and child.get("key"):
            out[child.get("key")] = child.get("value", "")
    return out


def _read_xes(path) -> EventLog:
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as e:
        line, col = e.position
        raise LogFormatError(f"[ERROR] {path}:{line}:{col}: malformed XES ({e.msg}).") from None
    raw: list[Event] = []
    rejected = 0
    row_no = 0
    for trace in root:
        if trace.tag.rsplit("}", 1)[-1] != "trace":
            continue
        case_id = _xes_attrs(trace).get("concept:name", "").strip()
        for event in trace:
            if event.tag.rsplit("}", 1)[-1] != "event":
                continue
            row_no += 1
            attrs = _xes_attrs(event)
            activity = attrs.get("concept:name", "").strip()
            if not case_id or not activity:
                rejected += 1
                continue
            ts = parse_timestamp(attrs.get("time:timestamp"))
            if ts is None:
                raise LogFormatError(
                    f"[ERROR] {path}: event {row_no}: unparseable timestamp "
                    f"{attrs.get('time:timestamp')!r}.",
                    row=row_no,
                )
            raw.append(Event(case_id, activity, ts))
    return _sorted_log(raw, rejected, str(path))


def write_log_csv(log: EventLog, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for e in log.events:
            writer.writerow((e.case_id, e.activity, format_timestamp(e.timestamp)))


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def compress_timeline(log: EventLog, target: float) -> ReplaySchedule:
    """Scale event times so the whole log replays in ``target`` seconds."""
    if target <= 0:
        raise CliError(f"[ERROR] Replay duration must be > 0, got {target}.")
    if not log.events:
        return ReplaySchedule(target, ())
    start = log.events[0].timestamp
    span = log.span
    if span <= timedelta(0):
        return ReplaySchedule(target, tuple(0.0 for _ in log.events))
    return ReplaySchedule(
        target, tuple((e.timestamp - start) / span * target for e in log.events)
    )


def replay(
    schedule: ReplaySchedule,
    log: EventLog,
    topic,
    speed_mode: str = MAX_SPEED,
    *,
    clock=time.monotonic,
    sleep=time.sleep,
) -> int:
    """Produce every event to ``topic``; returns the number produced."""
    if speed_mode not in (REAL_TIME, MAX_SPEED):
        raise CliError(f"[ERROR] Unknown speed mode '{speed_mode}'.")
    if speed_mode == REAL_TIME and len(schedule.offsets) != len(log.events):
        raise CliError("[ERROR] Replay schedule does not match the event log.")
    start = clock()
    for i, event in enumerate(log.events):
        if speed_mode == REAL_TIME:
            delay = start + schedule.offsets[i] - clock()
            if delay > 0:
                sleep(delay)
        topic.produce(event)
    log_event("replay_done", events=len(log.events), mode=speed_mode)
    return len(log.events)


# ---------------------------------------------------------------------------
# Synthetic logs
# ---------------------------------------------------------------------------


def apply_noise(trace: list[str], noise: float, rng: random.Random, alphabet) -> list[str]:
    """Per event, with probability ``noise``: swap with the next, drop, or insert before."""
    alphabet = sorted(alphabet)
    out: list[str] = []
    i = 0
    while i < len(trace):
        activity = trace[i]
        if noise > 0 and rng.random() < noise:
            op = rng.choice(NOISE_OPERATIONS)
            if op == "drop":
                i += 1
                continue
            if op == "insert" and alphabet:
                out.append(rng.choice(alphabet))
            elif op == "swap" and i + 1 < len(trace):
                out.extend((trace[i + 1], activity))
                i += 2
                continue
        out.append(activity)
        i += 1
    return out


def generate_synthetic(model_spec, cases: int, noise: float, seed: int) -> EventLog:
    """Play out ``cases`` traces of a process tree with noise; deterministic under ``seed``."""
    tree = process_tree.parse(model_spec) if isinstance(model_spec, str) else model_spec
    if cases < 1:
        raise CliError(f"[ERROR] empty log: cases must be >= 1, got {cases}.")
    if not 0.0 <= noise <= 1.0:
        raise CliError(f"[ERROR] Noise must be within [0, 1], got {noise}.")
    rng = random.Random(seed)
    alphabet = tree.activities()
    raw: list[Event] = []
    width = len(str(cases))
    for i in range(cases):
        case_id = f"c{i + 1:0{width}d}"
        trace = apply_noise(process_tree.play_out(tree, rng), noise, rng, alphabet)
        start = SYNTHETIC_START + i * SYNTHETIC_CASE_GAP
        for k, activity in enumerate(trace):
            raw.append(Event(case_id, activity, start + k * SYNTHETIC_EVENT_GAP))
    if not raw:
        raise CliError("[ERROR] empty log: the tree produced no visible events.")
    return _sorted_log(raw, 0, f"synthetic:{tree}")
