"""Alignment rendering: activity row over transition row."""

from prefixalign.alignment import SKIP
from prefixalign.formatters._table import _sanitize_str


def alignment_rows(moves):
    top = [m.get("activity") or SKIP for m in moves]
    bottom = [m.get("transition") or SKIP for m in moves]
    return top, bottom


def format_alignment_table(result):
    """Two-row grid with a cost footer.

    ``result``: {"mode", "trace", "cost", "moves": [{"kind", "activity", "transition"}]}.
    """
    moves = result.get("moves", [])
    top, bottom = alignment_rows(moves)
    top = [_sanitize_str(v) for v in top]
    bottom = [_sanitize_str(v) for v in bottom]
    widths = [max(len(a), len(b)) for a, b in zip(top, bottom, strict=True)]
    label_w = len("transition")

    def row(label, values):
        cells = [f"{v:<{w}}" for v, w in zip(values, widths, strict=True)]
        return f"{label:<{label_w}} | " + " | ".join(cells) if cells else f"{label:<{label_w}} |"

    lines = [row("activity", top), row("transition", bottom)]
    lines.append("")
    lines.append(f"cost: {result.get('cost')} ({result.get('mode', 'prefix')} alignment)")
    return "\n".join(line.rstrip() for line in lines)
