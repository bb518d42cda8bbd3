"""
Per-worker prefix cache with TinyLFU-style admission.

Keys are activity prefixes (tuples of labels), values are ``Snapshot``s.
The cache keeps its own copy of every admitted snapshot and hands out a
fresh copy on every hit, so a live case never aliases cached state.
"""

import hashlib
from collections import OrderedDict

from prefixalign import config
from prefixalign.fastpath import Snapshot

PrefixKey = tuple[str, ...]


class CountMinSketch:
    """Over-estimating frequency counter with periodic halving.

    Hashes are salted blake2b digests so estimates do not depend on
    ``PYTHONHASHSEED``.
    """

    def __init__(self, width: int, depth: int = config.SKETCH_DEPTH, reset_after: int = 0):
        self.width = max(1, width)
        self.depth = depth
        self.table = [[0] * self.width for _ in range(depth)]
        self.touches = 0
        self.reset_after = reset_after
        self.agings = 0

    def _slots(self, key: PrefixKey) -> list[int]:
        raw = "\x1f".join(key).encode("utf-8")
        out = []
        for row in range(self.depth):
            digest = hashlib.blake2b(raw, digest_size=8, salt=row.to_bytes(16, "big")).digest()
            out.append(int.from_bytes(digest, "big") % self.width)
        return out

    def touch(self, key: PrefixKey) -> int:
        for row, slot in enumerate(self._slots(key)):
            self.table[row][slot] += 1
        self.touches += 1
        if self.reset_after and self.touches >= self.reset_after:
            self.age()
        return self.estimate(key)

    def estimate(self, key: PrefixKey) -> int:
        return min(self.table[row][slot] for row, slot in enumerate(self._slots(key)))

    def age(self) -> None:
        for row in self.table:
            for i, count in enumerate(row):
                row[i] = count // 2
        self.touches = 0
        self.agings += 1


class PrefixCache:
    def __init__(self, capacity: int, policy: str = config.DEFAULT_CACHE_POLICY):
        if capacity < 0:
            raise ValueError(f"cache capacity must be >= 0, got {capacity}")
        if policy not in config.VALID_POLICIES:
            raise ValueError(f"unknown cache policy {policy!r}")
        self.capacity = capacity
        self.policy = policy
        # Recency order: first entry is least recently used.
        self.entries: OrderedDict[PrefixKey, Snapshot] = OrderedDict()
        self.uses: dict[PrefixKey, int] = {}
        self.sketch = CountMinSketch(
            config.SKETCH_WIDTH_FACTOR * capacity,
            reset_after=config.SKETCH_AGING_FACTOR * capacity,
        )
        self.hits = 0
        self.misses = 0
        self.admissions = 0
        self.rejections = 0
        self.evictions = 0

    @property
    def enabled(self) -> bool:
        return self.capacity > 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: PrefixKey) -> bool:
        return key in self.entries

    def keys(self) -> list[PrefixKey]:
        return list(self.entries)

    def victim(self) -> PrefixKey | None:
        if not self.entries:
            return None
        if self.policy == "lfu":
            # Least used; ties go to the least recently used.
            return min(self.entries, key=lambda k: self.uses.get(k, 0))
        return next(iter(self.entries))

    def counters(self) -> dict[str, int]:
        return {
            "cache_hits": self.hits,
            "cache_misses": self.misses,
            "cache_admissions": self.admissions,
            "cache_rejections": self.rejections,
            "cache_evictions": self.evictions,
            "cache_size": len(self.entries),
        }


def cache_lookup(cache: PrefixCache, key) -> Snapshot | None:
    """Independent copy of the snapshot for ``key``, or None on a miss."""
    if not cache.enabled:
        return None
    key = tuple(key)
    cache.sketch.touch(key)
    snapshot = cache.entries.get(key)
    if snapshot is None:
        cache.misses += 1
        return None
    cache.hits += 1
    cache.entries.move_to_end(key)
    cache.uses[key] = cache.uses.get(key, 0) + 1
    return snapshot.clone()


def cache_admit(cache: PrefixCache, key, snapshot: Snapshot) -> bool:
    """Store a copy of ``snapshot``; returns whether it is now resident."""
    if not cache.enabled:
        return False
    key = tuple(key)
    if key in cache.entries:
        cache.entries[key] = snapshot.clone()
        cache.entries.move_to_end(key)
        return True
    if len(cache.entries) >= cache.capacity:
        victim = cache.victim()
        assert victim is not None
        if cache.policy == "tinylfu" and not (
            cache.sketch.estimate(key) > cache.sketch.estimate(victim)
        ):
            cache.rejections += 1
            return False
        del cache.entries[victim]
        cache.uses.pop(victim, None)
        cache.evictions += 1
    cache.entries[key] = snapshot.clone()
    cache.uses[key] = 0
    cache.admissions += 1
    return True


def sketch_touch(cache: PrefixCache, key) -> int:
    return cache.sketch.touch(tuple(key))


def sketch_estimate(cache: PrefixCache, key) -> int:
    return cache.sketch.estimate(tuple(key))


def sketch_age(cache: PrefixCache) -> None:
    cache.sketch.age()
