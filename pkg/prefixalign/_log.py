"""Structured stderr logging for the streaming engine.

One JSON object per line, prefixed with ``[ENGINE]``. Off unless
``PREFIXALIGN_EVENT_LOG`` is set or the CLI runs with ``--verbose``.
Per-event lines are sampled by case id so a case is either fully
logged or not at all.
"""

import hashlib
import json
import sys

from prefixalign import config


def is_sampled(case_id):
    """Decide if a case's events should be logged based on sample rate."""
    rate = config.EVENT_LOG_SAMPLE_RATE
    if rate <= 0:
        return False
    if rate >= 1:
        return True
    if not case_id:
        return False
    digest = hashlib.sha256(str(case_id).encode("utf-8")).digest()
    bucket = int.from_bytes(digest[:4], "big") / 4294967295.0
    return bucket < rate


def log_event(event, *, case_id=None, **fields):
    """Emit a structured engine log line to stderr when enabled."""
    if not config.EVENT_LOG_ENABLED:
        return
    if case_id is not None and not is_sampled(case_id):
        return
    payload = {"event": event, **fields}
    if case_id is not None:
        payload["case_id"] = case_id
    print("[ENGINE] " + json.dumps(payload, ensure_ascii=False, sort_keys=True), file=sys.stderr)


def warn(message):
    """Human-facing warning, suppressed by --quiet."""
    if config.RUNTIME_QUIET:
        return
    print(f"[WARN] {message}", file=sys.stderr)
