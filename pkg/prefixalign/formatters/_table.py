"""Low-level text rendering helpers (stdlib only)."""

import re

_CONTROL_RE = re.compile(r"\x1b\[[0-9;]*[A-Za-z]|[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")


def _trunc(s, maxlen):
    """Truncate string with ellipsis indicator."""
    if not s:
        return ""
    return s[: maxlen - 1] + "…" if len(s) > maxlen else s


def _sanitize_str(s):
    """Strip ANSI escapes and control chars (keeps newlines and tabs)."""
    if not s:
        return s
    return _CONTROL_RE.sub("", str(s))


def _cell(value):
    return _sanitize_str(value) if isinstance(value, str) else str(value)


def _table(columns, rows, footer=None):
    """Left-aligned text table.

    columns: list of (name, width); width None sizes the column to its widest cell.
    The last column is never padded.
    """
    cells = [[_cell(v) for v in row] for row in rows]
    widths = []
    for i, (name, width) in enumerate(columns):
        if width is None:
            width = max([len(name), *(len(r[i]) for r in cells)])
        widths.append(width)

    def line(values):
        parts = [
            v if i == len(values) - 1 else f"{v:<{widths[i]}}" for i, v in enumerate(values)
        ]
        return " ".join(parts).rstrip()

    header = line([name for name, _ in columns])
    lines = [header, "-" * max(len(header), 40)]
    lines.extend(line(r) for r in cells)
    if footer:
        lines.append(f"\n{footer}")
    return "\n".join(lines)
