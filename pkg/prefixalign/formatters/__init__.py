"""Output formatting package for prefixalign.

Re-exports all public names so consumers can do:
    from prefixalign.formatters import format_run_summary
"""

from prefixalign.formatters._alignment import alignment_rows, format_alignment_table
from prefixalign.formatters._core import output, pretty_print
from prefixalign.formatters._run import format_run_summary, format_violations
from prefixalign.formatters._table import _CONTROL_RE, _sanitize_str, _table, _trunc

__all__ = [
    "_CONTROL_RE",
    "_sanitize_str",
    "_table",
    "_trunc",
    "alignment_rows",
    "format_alignment_table",
    "format_run_summary",
    "format_violations",
    "output",
    "pretty_print",
]
