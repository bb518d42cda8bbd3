"""
Command implementations for prefixalign.

Each cmd_*() function receives an argparse.Namespace and handles one CLI command.
The work happens in engine/search/streamsim; these thin wrappers handle
argparse → arguments, output files, and formatter dispatch.
"""

import json
import os

from prefixalign import config, process_tree
from prefixalign._log import warn
from prefixalign._utils import parse_choice, parse_trace
from prefixalign.alignment import build_spn
from prefixalign.engine import run_log
from prefixalign.exceptions import CliError, ModelError
from prefixalign.formatters import (
    format_alignment_table,
    format_run_summary,
    format_violations,
    output,
)
from prefixalign.metrics import export_metrics
from prefixalign.models import RunConfig
from prefixalign.pnml import load_model, write_model
from prefixalign.search import FULL, PREFIX, shortest_path
from prefixalign.streamsim import generate_synthetic, load_log, write_log_csv


def write_results(records, path) -> None:
    """Write one JSON object per line, in stream order."""
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for record in records:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
    except OSError as e:
        raise CliError(f"[ERROR] Cannot write results to {path}: {e.strerror or e}") from e


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


def cmd_replay(ns):
    cfg = RunConfig.from_namespace(ns)
    if cfg.synthetic:
        tree = process_tree.parse(cfg.synthetic)
        model = load_model(cfg.model) if cfg.model else process_tree.to_wfnet(tree)
        log = generate_synthetic(tree, cfg.cases, cfg.noise, cfg.seed)
    else:
        model = load_model(cfg.model)
        log = load_log(cfg.log, cfg.log_format)
    if cfg.cache_capacity == 0 and cfg.variant in ("ca", "dsc"):
        warn(f"cache capacity 0 disables the prefix cache for variant {cfg.variant}")

    outcome = run_log(log, model, cfg)
    write_results(outcome.records(), cfg.results_path)
    outcome.registry.merge_counters({"rows_rejected": log.rejected})
    export_metrics(outcome.registry, cfg.out_dir)

    summary = outcome.registry.summary()
    summary.update(variant=cfg.variant, out_dir=cfg.out_dir, rows_rejected=log.rejected)
    output(summary, format_run_summary, ns.format)
    if outcome.aborted:
        raise CliError(
            f"[ERROR] Run aborted: {outcome.error}",
            recovery_hint=f"Partial results and metrics were written to {cfg.out_dir}.",
        )


# ---------------------------------------------------------------------------
# align
# ---------------------------------------------------------------------------


def cmd_align(ns):
    model = load_model(ns.model)
    trace = parse_trace(ns.trace)
    mode = parse_choice(ns.mode or PREFIX, (PREFIX, FULL), "mode")
    heuristic = parse_choice(
        ns.heuristic or config.HEURISTIC, config.VALID_HEURISTICS, "heuristic"
    )
    spn = build_spn(model, trace)
    alignment = shortest_path(spn, mode, heuristic, ns.max_records)
    record = alignment.to_record("-")
    data = {
        "mode": mode,
        "trace": trace,
        "cost": record["cost"],
        "moves": record["moves"],
    }
    output(data, format_alignment_table, ns.format)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(ns):
    tree = process_tree.parse(ns.tree)
    seed = config.SEED if ns.seed is None else ns.seed
    log = generate_synthetic(tree, ns.cases, ns.noise, seed)
    out_dir = ns.out or config.OUT_DIR
    log_path = os.path.join(out_dir, "log.csv")
    model_path = os.path.join(out_dir, "model.pnml")
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_log_csv(log, log_path)
        write_model(process_tree.to_wfnet(tree, name="model"), model_path)
    except OSError as e:
        raise CliError(f"[ERROR] Cannot write to {out_dir}: {e.strerror or e}") from e
    output(
        {
            "tree": str(tree),
            "cases": len(log.traces()),
            "events": len(log),
            "log": log_path,
            "model": model_path,
        },
        None,
        ns.format,
    )


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(ns):
    try:
        net = load_model(ns.model)
    except ModelError as e:
        if not e.violations:
            raise
        output(
            {"model": ns.model, "valid": False, "violations": e.violations},
            format_violations,
            ns.format,
        )
        raise ModelError(
            f"[ERROR] {ns.model}: {len(e.violations)} violation(s).",
            violations=e.violations,
        ) from e
    output(
        {
            "model": ns.model,
            "valid": True,
            "places": len(net.places),
            "transitions": len(net.transitions),
            "activities": sorted(net.activities),
            "violations": [],
        },
        format_violations,
        ns.format,
    )
