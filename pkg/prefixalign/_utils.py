"""
Shared pure-utility functions for prefixalign.

These helpers have no business logic and no side effects.
"""

from datetime import UTC, datetime

from prefixalign.exceptions import CliError


def parse_timestamp(ts):
    """Parse an RFC 3339 timestamp into an aware datetime, or None if malformed.

    Naive timestamps are taken as UTC.
    """
    if not ts:
        return None
    try:
        # Handle both "2024-01-15T10:30:00Z" and "2024-01-15 10:30:00.000+01:00"
        parsed = datetime.fromisoformat(str(ts).strip().replace("Z", "+00:00"))
    except (ValueError, TypeError):
        return None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=UTC)
    return parsed


def format_timestamp(dt):
    """RFC 3339 in UTC with a ``Z`` suffix; microseconds only when present."""
    text = dt.astimezone(UTC).isoformat()
    return text.replace("+00:00", "Z")


def parse_trace(raw):
    """Split a comma-separated activity list. Blank items are rejected."""
    if raw is None or not raw.strip():
        return []
    items = [v.strip() for v in raw.split(",")]
    if any(not v for v in items):
        raise CliError(f"[ERROR] Invalid trace '{raw}': empty activity name.")
    return items


def parse_choice(raw, valid, field_name):
    """Validate an enumerated option (case-insensitive)."""
    value = (raw or "").strip().lower()
    if value not in valid:
        raise CliError(
            f"[ERROR] Invalid {field_name} '{raw}'. Valid: {', '.join(valid)}"
        )
    return value
