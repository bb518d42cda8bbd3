"""
In-process stand-in for a partitioned, key-hashed message topic.

Events are keyed by case id, so all events of a case land in the same
partition and are consumed in order. ``consumed`` counts commits, not polls:
an event a worker is still processing still counts as lag.
"""

import hashlib
import threading
import time
from collections import deque

from prefixalign.exceptions import CliError, TopicClosedError


def partition_of(case_id, partitions: int) -> int:
    """Stable 64-bit blake2b hash of the case id, modulo ``partitions``."""
    if partitions < 1:
        raise CliError(f"[ERROR] Partition count must be >= 1, got {partitions}.")
    digest = hashlib.blake2b(str(case_id).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % partitions


class Topic:
    def __init__(self, partitions: int, *, clock=time.monotonic):
        if partitions < 1:
            raise CliError(f"[ERROR] Partition count must be >= 1, got {partitions}.")
        self.partitions = partitions
        self._queues: list[deque] = [deque() for _ in range(partitions)]
        self.produced = [0] * partitions
        self.consumed = [0] * partitions
        # Seconds since creation of every produce / commit.
        self.produced_times: list[float] = []
        self.consumed_times: list[float] = []
        self._clock = clock
        self._started = clock()
        self._cond = threading.Condition()
        self._closed = False

    def elapsed(self) -> float:
        return self._clock() - self._started

    @property
    def closed(self) -> bool:
        return self._closed

    def produce(self, event) -> int:
        with self._cond:
            if self._closed:
                raise TopicClosedError("[ERROR] Cannot produce to a closed topic.")
            p = partition_of(event.case_id, self.partitions)
            self._queues[p].append(event)
            self.produced[p] += 1
            self.produced_times.append(self.elapsed())
            self._cond.notify_all()
            return p

    def close(self) -> None:
        """No more events will be produced; blocked consumers wake up."""
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def _oldest(self, partitions) -> int | None:
        best = None
        for p in partitions:
            queue = self._queues[p]
            if queue and (best is None or queue[0].seq < self._queues[best][0].seq):
                best = p
        return best

    def poll(self, partitions, timeout: float | None = None):
        """Pop the oldest queued event among ``partitions``.

        Returns ``(partition, event)``, or None when the topic is closed and
        those partitions are empty, or the timeout expired.
        """
        with self._cond:
            deadline = None if timeout is None else self._clock() + timeout
            while True:
                p = self._oldest(partitions)
                if p is not None:
                    return p, self._queues[p].popleft()
                if self._closed:
                    return None
                remaining = None if deadline is None else deadline - self._clock()
                if remaining is not None and remaining <= 0:
                    return None
                self._cond.wait(remaining)

    def commit(self, partition: int) -> None:
        """Mark one polled event of ``partition`` as fully processed."""
        with self._cond:
            if self.consumed[partition] >= self.produced[partition]:
                raise CliError(f"[ERROR] Commit beyond produced count on partition {partition}.")
            self.consumed[partition] += 1
            self.consumed_times.append(self.elapsed())

    def lag(self) -> list[int]:
        with self._cond:
            return [p - c for p, c in zip(self.produced, self.consumed, strict=True)]

    def snapshot(self) -> tuple[float, list[int], int, int]:
        """Consistent ``(t, lag per partition, produced total, consumed total)``."""
        with self._cond:
            lags = [p - c for p, c in zip(self.produced, self.consumed, strict=True)]
            return self.elapsed(), lags, sum(self.produced), sum(self.consumed)
