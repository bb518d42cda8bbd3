"""
Typed, validated run configuration.
"""

import os
from dataclasses import dataclass

from prefixalign import config
from prefixalign._utils import parse_choice
from prefixalign.exceptions import CliError

DEFAULT_REPLAY_SECONDS = 600.0
DEFAULT_SYNTHETIC_CASES = 100


def _pick(ns, name, default):
    """Flag value if given, else the env/.env-derived default."""
    value = getattr(ns, name, None)
    return default if value is None else value


@dataclass(frozen=True)
class RunConfig:
    """Validated input contract for `replay`."""

    model: str | None
    log: str | None
    log_format: str
    synthetic: str | None
    cases: int
    noise: float
    variant: str
    partitions: int
    workers: int
    cache_capacity: int
    cache_policy: str
    heuristic: str
    duration: float
    max_speed: bool
    seed: int
    out_dir: str
    lag_sample_ms: int
    max_records: int
    max_aggregates: int
    threaded: bool = True

    @property
    def results_path(self) -> str:
        return os.path.join(self.out_dir, "alignments.jsonl")

    @classmethod
    def from_namespace(cls, ns):
        model = getattr(ns, "model", None)
        log = getattr(ns, "log", None)
        synthetic = getattr(ns, "synthetic", None)
        if log and synthetic:
            raise CliError("[ERROR] Use either --log or --synthetic, not both.")
        if not log and not synthetic:
            raise CliError(
                "[ERROR] Nothing to replay.",
                recovery_hint="Pass --model with --log, or --synthetic '<tree>'.",
            )
        if log and not model:
            raise CliError("[ERROR] --model is required with --log.")

        variant = parse_choice(_pick(ns, "variant", config.VARIANT), config.VALID_VARIANTS, "variant")
        cache_policy = parse_choice(
            _pick(ns, "cache_policy", config.CACHE_POLICY), config.VALID_POLICIES, "cache policy"
        )
        heuristic = parse_choice(
            _pick(ns, "heuristic", config.HEURISTIC), config.VALID_HEURISTICS, "heuristic"
        )
        log_format = parse_choice(
            _pick(ns, "log_format", "csv"), config.VALID_LOG_FORMATS, "log format"
        )

        partitions = int(_pick(ns, "partitions", config.PARTITIONS))
        workers = int(_pick(ns, "workers", config.WORKERS))
        if workers < 1:
            raise CliError(f"[ERROR] --workers must be >= 1, got {workers}.")
        if partitions < workers:
            raise CliError(
                f"[ERROR] --workers ({workers}) cannot exceed --partitions ({partitions}).",
                recovery_hint="Each partition is consumed by exactly one worker.",
            )

        cache_capacity = int(_pick(ns, "cache_capacity", config.CACHE_CAPACITY))
        if cache_capacity < 0:
            raise CliError(f"[ERROR] --cache-capacity must be >= 0, got {cache_capacity}.")

        max_speed = bool(getattr(ns, "max_speed", False))
        duration = float(_pick(ns, "duration", DEFAULT_REPLAY_SECONDS))
        if not max_speed and duration <= 0:
            raise CliError(f"[ERROR] --duration must be > 0 seconds, got {duration}.")

        noise = float(_pick(ns, "noise", 0.0))
        if not 0.0 <= noise <= 1.0:
            raise CliError(f"[ERROR] --noise must be within [0, 1], got {noise}.")
        cases = int(_pick(ns, "cases", DEFAULT_SYNTHETIC_CASES))
        if synthetic and cases < 1:
            raise CliError(f"[ERROR] --cases must be >= 1, got {cases}.")

        lag_sample_ms = int(_pick(ns, "lag_sample_ms", config.LAG_SAMPLE_MS))
        if lag_sample_ms <= 0:
            raise CliError(f"[ERROR] --lag-sample-ms must be > 0, got {lag_sample_ms}.")
        max_records = int(_pick(ns, "max_records", config.MAX_RECORDS))
        if max_records < 1:
            raise CliError(f"[ERROR] --max-records must be >= 1, got {max_records}.")
        max_aggregates = int(_pick(ns, "max_aggregates", config.MAX_AGGREGATES))
        if max_aggregates < 0:
            raise CliError(f"[ERROR] --max-aggregates must be >= 0, got {max_aggregates}.")

        return cls(
            model=model,
            log=log,
            log_format=log_format,
            synthetic=synthetic,
            cases=cases,
            noise=noise,
            variant=variant,
            partitions=partitions,
            workers=workers,
            cache_capacity=cache_capacity,
            cache_policy=cache_policy,
            heuristic=heuristic,
            duration=duration,
            max_speed=max_speed,
            seed=int(_pick(ns, "seed", config.SEED)),
            out_dir=_pick(ns, "out", config.OUT_DIR),
            lag_sample_ms=lag_sample_ms,
            max_records=max_records,
            max_aggregates=max_aggregates,
            threaded=not (max_speed and workers == 1),
        )
