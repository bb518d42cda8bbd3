"""Run the acceptance workloads and report results as JSON.

Usage:
    py scripts/acceptance.py                 # exactness + performance checks
    py scripts/acceptance.py --realtime      # also the 30 s lag comparison (slow)
    py scripts/acceptance.py --trees 50      # smaller randomized corpus
    py scripts/acceptance.py --seed 3        # different corpus
"""

import argparse
import json
import os
import random
import sys
import tempfile
import time
from datetime import timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from prefixalign import config  # noqa: E402
from prefixalign.alignment import SynchronousProduct, build_spn  # noqa: E402
from prefixalign.engine import PathTaken, Worker, run_log  # noqa: E402
from prefixalign.metrics import export_metrics  # noqa: E402
from prefixalign.models import RunConfig  # noqa: E402
from prefixalign.process_tree import parse, play_out, random_process_tree, to_wfnet  # noqa: E402
from prefixalign.search import (  # noqa: E402
    FULL,
    SearchState,
    continue_search,
    search,
    shortest_path,
)
from prefixalign.streamsim import (  # noqa: E402
    SYNTHETIC_CASE_GAP,
    SYNTHETIC_EVENT_GAP,
    SYNTHETIC_START,
    Event,
    EventLog,
    apply_noise,
    compress_timeline,
)

VARIANTS = ("pl", "ds", "ca", "dsc")
NOISE_LEVELS = (0.0, 0.2, 0.5)
ALPHABET = "abcdefgh"
# Reference net: a or a silent step, then b or c.
REFERENCE_TREE = "seq(xor(a, tau), xor(b, c))"
PERF_TREE = "seq(a, xor(b, c, d), and(e, f), loop(g, h), xor(i, j))"
# Slack on best-of-N drain times; thread scheduling alone moves them a few percent.
SCALING_TOLERANCE = 1.05


def _run_config(variant: str, **overrides) -> RunConfig:
    values = dict(
        model=None,
        log=None,
        log_format="csv",
        synthetic=None,
        cases=0,
        noise=0.0,
        variant=variant,
        partitions=1,
        workers=1,
        cache_capacity=config.DEFAULT_CACHE_CAPACITY,
        cache_policy=config.DEFAULT_CACHE_POLICY,
        heuristic=config.DEFAULT_HEURISTIC,
        duration=30.0,
        max_speed=True,
        seed=0,
        out_dir="out",
        lag_sample_ms=100,
        max_records=config.DEFAULT_MAX_RECORDS,
        max_aggregates=0,
        threaded=False,
    )
    values.update(overrides)
    return RunConfig(**values)


def _log_from_traces(traces: list[list[str]]) -> EventLog:
    """Interleave traces the way synthetic logs are, one case per trace."""
    raw = []
    for i, trace in enumerate(traces):
        start = SYNTHETIC_START + i * SYNTHETIC_CASE_GAP
        for k, activity in enumerate(trace):
            raw.append(Event(f"c{i + 1:04d}", activity, start + k * SYNTHETIC_EVENT_GAP))
    raw.sort(key=lambda e: e.timestamp)
    events = [Event(e.case_id, e.activity, e.timestamp, i) for i, e in enumerate(raw)]
    return EventLog(events, 0, "acceptance")


def _corpus(seed: int, trees: int, traces_per_tree: int):
    rng = random.Random(seed)
    for _ in range(trees):
        size = rng.randint(2, len(ALPHABET))
        tree = random_process_tree(rng, ALPHABET[:size], depth=4)
        traces = [
            apply_noise(
                play_out(tree, rng),
                NOISE_LEVELS[k % len(NOISE_LEVELS)],
                rng,
                tree.activities(),
            )
            for k in range(traces_per_tree)
        ]
        yield tree, traces


def _costs_per_event(model, traces, variant: str) -> list[int]:
    worker = Worker(0, [0], model, variant=variant, cache_capacity=64)
    costs = []
    for i, trace in enumerate(traces):
        for k, activity in enumerate(trace):
            result = worker.consume(Event(f"t{i}", activity, None, k))
            costs.append(-1 if result is None else result.cost)
    return costs


# ---------------------------------------------------------------------------
# Exactness
# ---------------------------------------------------------------------------


def _from_scratch(model, prefix: list[str]) -> tuple[int, int]:
    """(cost, expanded markings) of an independent search on ``prefix``."""
    spn = build_spn(model, prefix)
    state = SearchState.start(spn)
    return search(state, spn).total_cost, state.stats.expanded


def _incremental_expanded(model, trace: list[str]) -> int:
    """Markings expanded by one search state carried across the whole trace."""
    spn = SynchronousProduct(model)
    state = SearchState.start(spn)
    for activity in trace:
        continue_search(state, spn, spn.extend(activity))
    return state.stats.expanded


def check_corpus(seed: int, trees: int, traces_per_tree: int) -> dict:
    """Oracle optimality, variant equivalence, monotonicity and search work on a random corpus."""
    t0 = time.monotonic()
    events = 0
    mismatches: list[str] = []
    variant_diffs = 0
    decreases = 0
    expanded_incremental = 0
    expanded_from_scratch = 0
    work_violations: list[str] = []
    for n, (tree, traces) in enumerate(_corpus(seed, trees, traces_per_tree)):
        model = to_wfnet(tree)
        oracle: list[int] = []
        for trace in traces:
            scratch = [_from_scratch(model, trace[: k + 1]) for k in range(len(trace))]
            oracle.extend(cost for cost, _ in scratch)
            restarts = sum(expanded for _, expanded in scratch)
            incremental = _incremental_expanded(model, trace)
            expanded_from_scratch += restarts
            expanded_incremental += incremental
            if incremental > restarts and len(work_violations) < 5:
                work_violations.append(f"tree {n}: {tree} trace {','.join(trace)}")
        events += len(oracle)
        per_variant = {v: _costs_per_event(model, traces, v) for v in VARIANTS}
        if per_variant["pl"] != oracle and len(mismatches) < 5:
            mismatches.append(f"tree {n}: {tree}")
        variant_diffs += sum(1 for v in VARIANTS if per_variant[v] != per_variant["pl"])
        pos = 0
        for trace in traces:
            costs = oracle[pos : pos + len(trace)]
            decreases += sum(1 for a, b in zip(costs, costs[1:], strict=False) if b < a)
            pos += len(trace)
    ok = not mismatches and not variant_diffs and not decreases and not work_violations
    return {
        "status": "pass" if ok else "fail",
        "trees": trees,
        "events": events,
        "oracle_mismatches": mismatches,
        "variant_differences": variant_diffs,
        "cost_decreases": decreases,
        "expanded_incremental": expanded_incremental,
        "expanded_from_scratch": expanded_from_scratch,
        "work_bound_violations": work_violations,
        "duration_s": round(time.monotonic() - t0, 1),
    }


def check_worked_examples() -> dict:
    t0 = time.monotonic()
    model = to_wfnet(parse(REFERENCE_TREE))
    trace = ["a", "b", "c"]
    full = shortest_path(build_spn(model, trace), FULL).total_cost
    prefix = [shortest_path(build_spn(model, trace[: k + 1])).total_cost for k in range(3)]

    stream = [("c1", "a"), ("c2", "a"), ("c2", "b"), ("c1", "b")]
    worker = Worker(0, [0], model, variant="ca", cache_capacity=10)
    paths = [worker.consume(Event(c, a, None, i)).path_taken for i, (c, a) in enumerate(stream)]
    report = worker.report()

    ds_paths = {}
    for variant in ("ds", "dsc"):
        w = Worker(0, [0], model, variant=variant, cache_capacity=10)
        w.consume(Event("c1", "a", None, 0))
        ds_paths[variant] = w.consume(Event("c1", "b", None, 1)).path_taken.value

    checks = {
        "full_cost": full == 1,
        "prefix_costs": prefix == [0, 0, 1],
        "cache_hits": report.get("cache_hits", 0) == 2,
        "searches": report.get("searches", 0) == 2,
        "hit_pattern": paths[1] == paths[3] == PathTaken.CACHE_HIT,
        "direct_sync": all(p == PathTaken.DIRECT_SYNC.value for p in ds_paths.values()),
    }
    return {
        "status": "pass" if all(checks.values()) else "fail",
        "checks": checks,
        "prefix_costs": prefix,
        "full_cost": full,
        "duration_s": round(time.monotonic() - t0, 1),
    }


def check_time_compression(seed: int, sets: int = 100) -> dict:
    t0 = time.monotonic()
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(sets):
        gaps = sorted(rng.randint(0, 10**6) for _ in range(rng.randint(3, 30)))
        if gaps[-1] == gaps[0]:
            continue
        log = EventLog(
            [
                Event("c", "a", SYNTHETIC_START + timedelta(seconds=g), i)
                for i, g in enumerate(gaps)
            ]
        )
        target = rng.uniform(1.0, 600.0)
        offsets = compress_timeline(log, target).offsets
        span = gaps[-1] - gaps[0]
        for g, off in zip(gaps, offsets, strict=True):
            expected = (g - gaps[0]) / span * target
            worst = max(worst, abs(off - expected) / target)
    return {
        "status": "pass" if worst <= 1e-9 else "fail",
        "sets": sets,
        "worst_relative_error": worst,
        "duration_s": round(time.monotonic() - t0, 1),
    }


def check_determinism(seed: int) -> dict:
    t0 = time.monotonic()
    tree = parse(PERF_TREE)
    log = _variant_workload(tree, seed, cases=200)
    model = to_wfnet(tree)
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run_no in range(2):
            out = os.path.join(tmp, str(run_no))
            outcome = run_log(log, model, _run_config("dsc", out_dir=out))
            export_metrics(outcome.registry, out)
            with open(os.path.join(out, "counters.csv"), "rb") as f:
                blobs.append((json.dumps(outcome.records(), sort_keys=True), f.read()))
    same = blobs[0] == blobs[1]
    return {
        "status": "pass" if same else "fail",
        "identical": same,
        "duration_s": round(time.monotonic() - t0, 1),
    }


# ---------------------------------------------------------------------------
# Performance trends
# ---------------------------------------------------------------------------


def _variant_workload(tree, seed: int, cases: int = 500, variants: int = 10, noise: float = 0.1):
    """``cases`` traces drawn from ``variants`` distinct noisy traces of ``tree``."""
    rng = random.Random(seed)
    pool: list[list[str]] = []
    attempts = 0
    while len(pool) < variants and attempts < 1000:
        attempts += 1
        trace = apply_noise(play_out(tree, rng), noise, rng, tree.activities())
        if trace and trace not in pool:
            pool.append(trace)
    return _log_from_traces([list(rng.choice(pool)) for _ in range(cases)])


def check_performance(seed: int) -> dict:
    t0 = time.monotonic()
    tree = parse(PERF_TREE)
    log = _variant_workload(tree, seed)
    model = to_wfnet(tree)
    latency = {}
    hit_rate = 0.0
    for variant in VARIANTS:
        outcome = run_log(log, model, _run_config(variant))
        summary = outcome.registry.summary()
        latency[variant] = summary["mean_latency_ms"]
        if variant == "ca":
            lookups = summary["cache_hits"] + summary["cache_misses"]
            hit_rate = summary["cache_hits"] / lookups if lookups else 0.0
    ok = latency["dsc"] <= 0.7 * latency["pl"] and hit_rate >= 0.5
    return {
        "status": "pass" if ok else "fail",
        "events": len(log),
        "mean_latency_ms": latency,
        "ca_hit_rate": round(hit_rate, 4),
        "duration_s": round(time.monotonic() - t0, 1),
    }


def _drain_seconds(log, model, partitions: int, repeats: int) -> float:
    """Best wall time of a threaded max-speed run with one worker per partition."""
    best = float("inf")
    for _ in range(repeats):
        cfg = _run_config("dsc", partitions=partitions, workers=partitions, threaded=True)
        started = time.perf_counter()
        outcome = run_log(log, model, cfg)
        elapsed = time.perf_counter() - started
        if outcome.aborted:
            raise RuntimeError(outcome.error)
        best = min(best, elapsed)
    return best


def check_scaling(seed: int, repeats: int = 3) -> dict:
    """Four workers on four partitions must drain no slower than one on one."""
    t0 = time.monotonic()
    tree = parse(PERF_TREE)
    log = _variant_workload(tree, seed)
    model = to_wfnet(tree)
    single = _drain_seconds(log, model, 1, repeats)
    multi = _drain_seconds(log, model, 4, repeats)
    ok = multi <= single * SCALING_TOLERANCE
    return {
        "status": "pass" if ok else "fail",
        "events": len(log),
        "drain_s": {"1x1": round(single, 4), "4x4": round(multi, 4)},
        "tolerance": SCALING_TOLERANCE,
        "duration_s": round(time.monotonic() - t0, 1),
    }


def check_lag(seed: int) -> dict:
    t0 = time.monotonic()
    tree = parse(PERF_TREE)
    log = _variant_workload(tree, seed)
    model = to_wfnet(tree)
    averaged = {}
    final = {}
    conserved = True
    for variant in VARIANTS:
        cfg = _run_config(variant, max_speed=False, duration=30.0, threaded=True)
        registry = run_log(log, model, cfg).registry
        averaged[variant] = round(registry.time_averaged_lag(), 4)
        final[variant] = registry.final_lag()
        lag_series = registry.total_lag_series()
        for (_, lag), (_, produced, consumed) in zip(
            lag_series, registry.throughput, strict=False
        ):
            conserved = conserved and produced == consumed + lag
    ok = conserved and not any(final.values()) and averaged["dsc"] <= averaged["pl"]
    return {
        "status": "pass" if ok else "fail",
        "time_averaged_lag": averaged,
        "final_lag": final,
        "conservation": conserved,
        "duration_s": round(time.monotonic() - t0, 1),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description="Run the acceptance workloads")
    parser.add_argument("--seed", type=int, default=1, help="Corpus seed")
    parser.add_argument("--trees", type=int, default=200, help="Random trees in the corpus")
    parser.add_argument("--traces", type=int, default=5, help="Traces per tree")
    parser.add_argument("--realtime", action="store_true", help="Run the real-time lag check")
    args = parser.parse_args()

    t0 = time.monotonic()
    checks: dict[str, dict] = {}

    print("Running worked examples...", file=sys.stderr)
    checks["worked_examples"] = check_worked_examples()

    print("Running randomized corpus...", file=sys.stderr)
    checks["corpus"] = check_corpus(args.seed, args.trees, args.traces)

    print("Running time compression...", file=sys.stderr)
    checks["time_compression"] = check_time_compression(args.seed)

    print("Running determinism...", file=sys.stderr)
    checks["determinism"] = check_determinism(args.seed)

    print("Running performance trend...", file=sys.stderr)
    checks["performance"] = check_performance(args.seed)

    print("Running drain scaling...", file=sys.stderr)
    checks["scaling"] = check_scaling(args.seed)

    if args.realtime:
        print("Running real-time lag comparison...", file=sys.stderr)
        checks["lag"] = check_lag(args.seed)
    else:
        checks["lag"] = {"status": "skip", "reason": "--realtime not given"}

    statuses = [c["status"] for c in checks.values()]
    result = {
        "overall": "pass" if all(s in ("pass", "skip") for s in statuses) else "fail",
        "checks": checks,
        "total_duration_s": round(time.monotonic() - t0, 1),
    }
    print(json.dumps(result, indent=2))
    if result["overall"] != "pass":
        sys.exit(1)


if __name__ == "__main__":
    main()
