"""Run summaries and validation reports."""

from prefixalign.formatters._table import _sanitize_str, _table

_SUMMARY_FIELDS = (
    ("variant", "Variant"),
    ("events", "Events"),
    ("skipped", "Skipped"),
    ("cases", "Cases"),
    ("mean_latency_ms", "Mean latency (ms)"),
    ("cache_hits", "Cache hits"),
    ("cache_misses", "Cache misses"),
    ("direct_sync", "Direct sync"),
    ("searches", "Searches"),
    ("expanded", "Expanded states"),
    ("final_lag", "Final lag"),
)


def format_run_summary(summary):
    rows = [(label, summary.get(key, "-")) for key, label in _SUMMARY_FIELDS]
    footer = None
    if summary.get("aborted"):
        footer = f"ABORTED: {summary.get('error')}"
    elif summary.get("out_dir"):
        footer = f"Outputs written to {summary['out_dir']}"
    return _table([("Metric", 20), ("Value", None)], rows, footer)


def format_violations(report):
    violations = report.get("violations", [])
    name = _sanitize_str(report.get("model", "model"))
    if not violations:
        return (
            f"{name}: valid WF-net ({report.get('places', 0)} places, "
            f"{report.get('transitions', 0)} transitions)"
        )
    lines = [f"{name}: {len(violations)} violation(s)"]
    lines.extend(f"  {i}. {_sanitize_str(v)}" for i, v in enumerate(violations, start=1))
    return "\n".join(lines)
