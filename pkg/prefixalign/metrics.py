"""
Run metrics: per-trace computation time, latency histogram, consumer lag
and throughput samples, and monotone counters.

Timing values never go into ``counters``; ``counters.csv`` and the results
stream stay byte-identical across deterministic runs.
"""

import bisect
import csv
import os
import threading
from collections import Counter

from prefixalign import config
from prefixalign.exceptions import CliError


class MetricsRegistry:
    def __init__(self, partitions: int = 1, buckets=config.LATENCY_BUCKETS_MS):
        self.partitions = partitions
        self.buckets = tuple(buckets)
        self.histogram = [0] * (len(self.buckets) + 1)
        # case id -> [events, total ms]
        self.per_trace: dict[str, list[float]] = {}
        # (t, partition, lag)
        self.lag_samples: list[tuple[float, int, int]] = []
        # (t, produced_cum, consumed_cum)
        self.throughput: list[tuple[float, int, int]] = []
        self.counters: Counter[str] = Counter()
        self.aborted = False
        self.error: str | None = None
        self._lock = threading.Lock()

    def record_event(self, case_id: str, latency_ms: float, path: str) -> None:
        with self._lock:
            entry = self.per_trace.setdefault(case_id, [0, 0.0])
            entry[0] += 1
            entry[1] += latency_ms
            self.histogram[bisect.bisect_left(self.buckets, latency_ms)] += 1
            self.counters["events_processed"] += 1
            self.counters[f"path_{path}"] += 1

    def record_skipped(self) -> None:
        with self._lock:
            self.counters["events_skipped"] += 1

    def merge_counters(self, values) -> None:
        with self._lock:
            for key, value in values.items():
                self.counters[key] += value

    def add_sample(self, t: float, lags, produced: int, consumed: int) -> None:
        with self._lock:
            for p, lag in enumerate(lags):
                self.lag_samples.append((t, p, lag))
            self.throughput.append((t, produced, consumed))

    def mark_aborted(self, error: str) -> None:
        with self._lock:
            self.aborted = True
            self.error = error

    # ------------------------------------------------------------------
    # Derived values
    # ------------------------------------------------------------------

    def events(self) -> int:
        return self.counters["events_processed"]

    def mean_latency_ms(self) -> float:
        total_events = sum(int(v[0]) for v in self.per_trace.values())
        if not total_events:
            return 0.0
        return sum(v[1] for v in self.per_trace.values()) / total_events

    def total_lag_series(self) -> list[tuple[float, int]]:
        """Summed lag over partitions per sample instant, in sample order."""
        series: dict[float, int] = {}
        for t, _, lag in self.lag_samples:
            series[t] = series.get(t, 0) + lag
        return list(series.items())

    def final_lag(self) -> int:
        series = self.total_lag_series()
        return series[-1][1] if series else 0

    def time_averaged_lag(self) -> float:
        """Step-function average of total lag between the first and last sample."""
        series = self.total_lag_series()
        if not series:
            return 0.0
        if len(series) == 1 or series[-1][0] <= series[0][0]:
            return float(series[0][1])
        area = 0.0
        for (t0, lag), (t1, _) in zip(series, series[1:], strict=False):
            area += lag * (t1 - t0)
        return area / (series[-1][0] - series[0][0])

    def summary(self) -> dict:
        c = self.counters
        return {
            "events": c["events_processed"],
            "skipped": c["events_skipped"],
            "cases": len(self.per_trace),
            "mean_latency_ms": round(self.mean_latency_ms(), 4),
            "cache_hits": c["cache_hits"],
            "cache_misses": c["cache_misses"],
            "direct_sync": c["path_direct_sync"],
            "searches": c["searches"],
            "expanded": c["expanded"],
            "final_lag": self.final_lag(),
            "aborted": self.aborted,
            "error": self.error,
        }


def sample_lag(topic, registry: MetricsRegistry) -> tuple[float, list[int]]:
    """Append one lag/throughput sample taken atomically from ``topic``."""
    t, lags, produced, consumed = topic.snapshot()
    registry.add_sample(t, lags, produced, consumed)
    return t, lags


class LagSampler(threading.Thread):
    """Samples lag every ``period_ms`` until stopped; always takes a final sample."""

    def __init__(self, topic, registry: MetricsRegistry, period_ms: int):
        if period_ms <= 0:
            raise CliError(f"[ERROR] Lag sample period must be > 0 ms, got {period_ms}.")
        super().__init__(name="lag-sampler", daemon=True)
        self.topic = topic
        self.registry = registry
        self.period = period_ms / 1000.0
        self._stop_event = threading.Event()

    def run(self) -> None:
        sample_lag(self.topic, self.registry)
        while not self._stop_event.wait(self.period):
            sample_lag(self.topic, self.registry)

    def stop(self) -> None:
        self._stop_event.set()
        self.join()
        sample_lag(self.topic, self.registry)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def export_metrics(registry: MetricsRegistry, out_dir) -> list[str]:
    """Write the metric CSVs into ``out_dir``; returns the written paths.

    A run that recorded nothing gets header-only files.
    """
    bounds = [f"{b:g}" for b in registry.buckets] + ["+inf"]
    files = {
        "per_trace.csv": (
            ("case", "events", "mean_ms"),
            [
                (case, int(n), f"{total / n:.4f}" if n else "0.0000")
                for case, (n, total) in sorted(registry.per_trace.items())
            ],
        ),
        "lag.csv": (
            ("t", "partition", "lag"),
            [(f"{t:.4f}", p, lag) for t, p, lag in registry.lag_samples],
        ),
        "throughput.csv": (
            ("t", "produced_cum", "consumed_cum"),
            [(f"{t:.4f}", prod, cons) for t, prod, cons in registry.throughput],
        ),
        "counters.csv": (
            ("name", "value"),
            sorted(registry.counters.items()),
        ),
        "histogram.csv": (
            ("le_ms", "count"),
            list(zip(bounds, registry.histogram, strict=True)) if any(registry.histogram) else [],
        ),
    }
    written = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        for name, (header, rows) in files.items():
            path = os.path.join(out_dir, name)
            _write_csv(path, header, rows)
            written.append(path)
    except OSError as e:
        raise CliError(
            f"[ERROR] Cannot write metrics to {out_dir}: {e.strerror or e}",
            recovery_hint="Choose a writable --out directory.",
        ) from e
    return written
