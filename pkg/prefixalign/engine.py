"""
Streaming conformance engine: workers consume a partitioned topic and keep
one aggregate per case, answering every event with the case's optimal
prefix-alignment.

Variants:
  pl   extend the SPN and continue the case's search
  ds   try direct synchronizing first
  ca   try the prefix cache first
  dsc  cache, then direct synchronizing, then search
"""

import threading
import time
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from enum import StrEnum

from prefixalign._log import log_event
from prefixalign.alignment import PrefixAlignment, SynchronousProduct, build_spn
from prefixalign.exceptions import CliError
from prefixalign.fastpath import EndMarking, Snapshot, try_direct_synchronize
from prefixalign.metrics import LagSampler, MetricsRegistry
from prefixalign.petri import WFNet
from prefixalign.prefix_cache import PrefixCache, cache_admit, cache_lookup
from prefixalign.search import (
    Heuristic,
    SearchState,
    continue_search,
    defer_extension,
    search,
)
from prefixalign.streamsim import MAX_SPEED, REAL_TIME, EventLog, compress_timeline, replay
from prefixalign.topic import Topic

POLL_TIMEOUT = 0.05
_SEARCH_STATS = ("expanded", "queued", "reopened")


class PathTaken(StrEnum):
    CACHE_HIT = "cache_hit"
    DIRECT_SYNC = "direct_sync"
    SEARCH = "search"


@dataclass
class CaseAggregate:
    """Per-case state. ``spn is None`` means only the raw prefix is retained."""

    case_id: str
    prefix: list[str] = field(default_factory=list)
    spn: SynchronousProduct | None = None
    search: SearchState | None = None
    alignment: PrefixAlignment = field(default_factory=PrefixAlignment)
    latencies_ms: list[float] = field(default_factory=list)
    end_marking: EndMarking | None = None

    @classmethod
    def fresh(cls, case_id, model: WFNet, heuristic, max_records) -> "CaseAggregate":
        spn = SynchronousProduct(model)
        agg = cls(case_id, [], spn, SearchState.start(spn, heuristic, max_records))
        agg.end_marking = (agg.alignment, spn.initial_marking)
        return agg

    @property
    def is_raw(self) -> bool:
        return self.spn is None or self.search is None

    def snapshot(self) -> Snapshot:
        assert self.spn is not None and self.search is not None
        return Snapshot(self.spn, self.search, self.alignment, self.end_marking)

    def install(self, snapshot: Snapshot) -> None:
        self.spn = snapshot.spn
        self.search = snapshot.search
        self.alignment = snapshot.alignment
        self.end_marking = snapshot.end_marking
        self.prefix = list(snapshot.spn.trace)

    def drop_to_raw(self) -> None:
        self.spn = None
        self.search = None
        self.alignment = PrefixAlignment()
        self.end_marking = None


@dataclass(frozen=True)
class AlignmentResult:
    case_id: str
    seq: int
    alignment: PrefixAlignment
    cost: int
    latency_ms: float
    path_taken: PathTaken
    worker: int = 0

    def to_record(self) -> dict:
        record = self.alignment.to_record(self.case_id)
        record["seq"] = self.seq
        record["path"] = self.path_taken.value
        return record


class Worker:
    """Owns its partitions' aggregates and one prefix cache; never shared across threads."""

    def __init__(
        self,
        worker_id: int,
        partitions: list[int],
        model: WFNet,
        *,
        variant: str = "pl",
        cache_capacity: int = 0,
        cache_policy: str = "tinylfu",
        heuristic: str = Heuristic.ZERO,
        max_records: int | None = None,
        max_aggregates: int = 0,
        registry: MetricsRegistry | None = None,
        clock=time.perf_counter,
    ):
        self.worker_id = worker_id
        self.partitions = list(partitions)
        self.model = model
        self.variant = variant
        self.uses_cache = variant in ("ca", "dsc")
        self.uses_direct_sync = variant in ("ds", "dsc")
        self.cache = PrefixCache(cache_capacity if self.uses_cache else 0, cache_policy)
        self.heuristic = Heuristic(heuristic)
        self.max_records = max_records
        self.max_aggregates = max_aggregates
        self.registry = registry if registry is not None else MetricsRegistry()
        self.clock = clock
        self.aggregates: dict[str, CaseAggregate] = {}
        # Aggregates holding search state, least recently used first.
        self._live: OrderedDict[str, None] = OrderedDict()
        self.results: list[AlignmentResult] = []
        self.counters: Counter[str] = Counter()

    def aggregate_for(self, case_id: str) -> CaseAggregate:
        agg = self.aggregates.get(case_id)
        if agg is None:
            agg = CaseAggregate.fresh(case_id, self.model, self.heuristic, self.max_records)
            self.aggregates[case_id] = agg
        return agg

    def touch(self, agg: CaseAggregate) -> None:
        """Mark ``agg`` most recently used and enforce the aggregate bound."""
        if agg.is_raw:
            self._live.pop(agg.case_id, None)
            return
        self._live[agg.case_id] = None
        self._live.move_to_end(agg.case_id)
        if not self.max_aggregates:
            return
        while len(self._live) > self.max_aggregates:
            victim, _ = self._live.popitem(last=False)
            self.aggregates[victim].drop_to_raw()
            self.counters["aggregates_evicted"] += 1
            log_event("aggregate_evicted", case_id=victim, worker=self.worker_id)

    def _account(self, state: SearchState, before: tuple[int, ...]) -> None:
        self.counters["searches"] += 1
        for name, prev in zip(_SEARCH_STATS, before, strict=True):
            self.counters[name] += getattr(state.stats, name) - prev

    def rebuild(self, agg: CaseAggregate) -> None:
        """Restore search state for a raw prefix with a from-scratch search."""
        spn = build_spn(self.model, agg.prefix)
        state = SearchState.start(spn, self.heuristic, self.max_records)
        agg.alignment = search(state, spn)
        agg.spn, agg.search = spn, state
        assert state.last_goal is not None
        agg.end_marking = (agg.alignment, state.last_goal)
        self._account(state, (0, 0, 0))
        self.counters["aggregates_rebuilt"] += 1

    def extend_and_search(self, agg: CaseAggregate, new: list[int]) -> PrefixAlignment:
        assert agg.spn is not None and agg.search is not None
        state = agg.search
        before = tuple(getattr(state.stats, name) for name in _SEARCH_STATS)
        alignment = continue_search(state, agg.spn, new)
        self._account(state, before)
        assert state.last_goal is not None
        agg.end_marking = (alignment, state.last_goal)
        return alignment

    def consume(self, event) -> AlignmentResult | None:
        """Process one event; a CliError skips the event and keeps the stream going."""
        agg = self.aggregates.get(event.case_id)
        before = list(agg.prefix) if agg is not None else []
        try:
            result = process_event(self, event)
        except CliError as e:
            agg = self.aggregates.get(event.case_id)
            if agg is not None:
                agg.prefix = before
                agg.drop_to_raw()
                self.touch(agg)
            self.registry.record_skipped()
            log_event(
                "event_skipped",
                worker=self.worker_id,
                case=event.case_id,
                seq=event.seq,
                error=str(e),
            )
            return None
        self.results.append(result)
        return result

    def report(self) -> dict[str, int]:
        values = dict(self.counters)
        if self.uses_cache:
            values.update(self.cache.counters())
            values.pop("cache_size", None)
        values["aggregates"] = len(self.aggregates)
        return values


def process_event(worker: Worker, event) -> AlignmentResult:
    """Extend the event's case by one activity and return its optimal prefix-alignment."""
    started = worker.clock()
    agg = worker.aggregate_for(event.case_id)
    activity = event.activity
    key = (*agg.prefix, activity)
    path = None

    if worker.uses_cache:
        snapshot = cache_lookup(worker.cache, key)
        if snapshot is not None:
            agg.install(snapshot)
            path = PathTaken.CACHE_HIT

    if path is None:
        if agg.is_raw:
            worker.rebuild(agg)
        assert agg.spn is not None and agg.search is not None
        new = agg.spn.extend(activity)
        agg.prefix.append(activity)
        alignment = None
        if worker.uses_direct_sync:
            alignment = try_direct_synchronize(agg, activity)
            if alignment is not None:
                defer_extension(agg.search, agg.spn, new)
                path = PathTaken.DIRECT_SYNC
        if alignment is None:
            alignment = worker.extend_and_search(agg, new)
            path = PathTaken.SEARCH
        agg.alignment = alignment
        if worker.uses_cache:
            cache_admit(worker.cache, key, agg.snapshot())

    worker.touch(agg)
    latency_ms = (worker.clock() - started) * 1000.0
    agg.latencies_ms.append(latency_ms)
    result = AlignmentResult(
        agg.case_id,
        event.seq,
        agg.alignment,
        agg.alignment.total_cost,
        latency_ms,
        path,
        worker.worker_id,
    )
    worker.registry.record_event(agg.case_id, latency_ms, path.value)
    log_event(
        "event_aligned",
        case_id=agg.case_id,
        seq=event.seq,
        activity=activity,
        path=path.value,
        cost=result.cost,
    )
    return result


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


@dataclass
class RunOutcome:
    registry: MetricsRegistry
    results: list[AlignmentResult]
    workers: list[Worker]
    aborted: bool = False
    error: str | None = None

    def records(self) -> list[dict]:
        return [r.to_record() for r in self.results]


def assign_partitions(partitions: int, workers: int) -> list[list[int]]:
    """Round-robin partition indices over workers."""
    if workers < 1 or partitions < workers:
        raise CliError(
            f"[ERROR] Need partitions >= workers >= 1, got {partitions} partitions "
            f"and {workers} workers."
        )
    return [[p for p in range(partitions) if p % workers == w] for w in range(workers)]


def build_workers(model: WFNet, cfg, registry: MetricsRegistry) -> list[Worker]:
    return [
        Worker(
            w,
            assigned,
            model,
            variant=cfg.variant,
            cache_capacity=cfg.cache_capacity,
            cache_policy=cfg.cache_policy,
            heuristic=cfg.heuristic,
            max_records=cfg.max_records,
            max_aggregates=cfg.max_aggregates,
            registry=registry,
        )
        for w, assigned in enumerate(assign_partitions(cfg.partitions, cfg.workers))
    ]


def _drain_loop(worker: Worker, topic: Topic, stop: threading.Event, failures: list) -> None:
    while not stop.is_set():
        item = topic.poll(worker.partitions, timeout=POLL_TIMEOUT)
        if item is None:
            if topic.closed:
                return
            continue
        partition, event = item
        try:
            worker.consume(event)
        except Exception as e:
            failures.append((worker.worker_id, e))
            stop.set()
            topic.close()
            return
        topic.commit(partition)


def start_workers(topic: Topic, workers: list[Worker]):
    """Start one consumer thread per worker; returns (threads, stop event, failures)."""
    stop = threading.Event()
    failures: list = []
    threads = [
        threading.Thread(
            target=_drain_loop,
            args=(w, topic, stop, failures),
            name=f"worker-{w.worker_id}",
            daemon=True,
        )
        for w in workers
    ]
    for t in threads:
        t.start()
    return threads, stop, failures


def drain_inline(topic: Topic, workers: list[Worker]) -> list:
    """Consume everything queued, one event per worker per round, on this thread."""
    failures: list = []
    while True:
        progressed = False
        for worker in workers:
            item = topic.poll(worker.partitions, timeout=0)
            if item is None:
                continue
            partition, event = item
            try:
                worker.consume(event)
            except Exception as e:
                failures.append((worker.worker_id, e))
                return failures
            topic.commit(partition)
            progressed = True
        if not progressed:
            return failures


def finish(topic: Topic, workers: list[Worker], registry: MetricsRegistry, failures) -> RunOutcome:
    """Merge worker reports into ``registry`` and collect results in stream order."""
    for w in workers:
        registry.merge_counters(w.report())
    registry.merge_counters(
        {"events_produced": sum(topic.produced), "events_consumed": sum(topic.consumed)}
    )
    results = sorted((r for w in workers for r in w.results), key=lambda r: r.seq)
    outcome = RunOutcome(registry, results, workers)
    if failures:
        worker_id, error = failures[0]
        outcome.aborted = True
        outcome.error = f"worker {worker_id}: {type(error).__name__}: {error}"
        registry.mark_aborted(outcome.error)
        log_event("worker_failed", worker=worker_id, error=outcome.error)
    log_event("run_end", events=len(results), aborted=outcome.aborted)
    return outcome


def run(topic: Topic, workers: list[Worker], registry: MetricsRegistry, *, threaded=True) -> RunOutcome:
    """Consume ``topic`` until it is closed and drained (or a worker fails)."""
    if threaded:
        threads, _, failures = start_workers(topic, workers)
        for t in threads:
            t.join()
    else:
        failures = drain_inline(topic, workers)
    return finish(topic, workers, registry, failures)


def run_log(log: EventLog, model: WFNet, cfg) -> RunOutcome:
    """Replay ``log`` into a fresh topic and align every event under ``cfg``."""
    registry = MetricsRegistry(cfg.partitions)
    topic = Topic(cfg.partitions)
    workers = build_workers(model, cfg, registry)
    sampler = LagSampler(topic, registry, cfg.lag_sample_ms)
    log_event(
        "run_start",
        variant=cfg.variant,
        partitions=cfg.partitions,
        workers=cfg.workers,
        events=len(log),
        threaded=cfg.threaded,
    )
    sampler.start()
    try:
        if cfg.max_speed:
            schedule = compress_timeline(log, 1.0)
            replay(schedule, log, topic, MAX_SPEED)
            topic.close()
            outcome = run(topic, workers, registry, threaded=cfg.threaded)
        else:
            schedule = compress_timeline(log, cfg.duration)
            threads, stop, failures = start_workers(topic, workers)
            try:
                replay(schedule, log, topic, REAL_TIME)
            except CliError:
                if not stop.is_set():
                    raise
            finally:
                topic.close()
                for t in threads:
                    t.join()
            outcome = finish(topic, workers, registry, failures)
    finally:
        sampler.stop()
    return outcome
