"""
prefixalign shared configuration, constants, and module-level state.
Standalone module, no imports from other project files.
"""

import os

# ---------------------------------------------------------------------------
# .env path and helpers
# ---------------------------------------------------------------------------

_PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
_PROJECT_ROOT = os.path.dirname(_PACKAGE_DIR)

ENV_PATH = os.path.join(_PROJECT_ROOT, ".env")

KNOWN_ENV_KEYS = (
    "PREFIXALIGN_VARIANT",
    "PREFIXALIGN_PARTITIONS",
    "PREFIXALIGN_WORKERS",
    "PREFIXALIGN_CACHE_CAPACITY",
    "PREFIXALIGN_CACHE_POLICY",
    "PREFIXALIGN_HEURISTIC",
    "PREFIXALIGN_MAX_RECORDS",
    "PREFIXALIGN_MAX_AGGREGATES",
    "PREFIXALIGN_LAG_SAMPLE_MS",
    "PREFIXALIGN_SEED",
    "PREFIXALIGN_OUT_DIR",
    "PREFIXALIGN_EVENT_LOG",
    "PREFIXALIGN_EVENT_LOG_SAMPLE_RATE",
    "PREFIXALIGN_DEBUG",
)


def load_env():
    env = {}
    if os.path.exists(ENV_PATH):
        try:
            with open(ENV_PATH) as f:
                for line in f:
                    line = line.strip()
                    if line and not line.startswith("#") and "=" in line:
                        key, val = line.split("=", 1)
                        env[key.strip()] = val.strip()
        except OSError:
            pass
    # .env file values take precedence over the process environment.
    for key in KNOWN_ENV_KEYS:
        if key not in env and key in os.environ:
            env[key] = os.environ[key]
    return env


def _env_bool(key: str, default: bool = False) -> bool:
    """Parse common boolean env formats."""
    raw = env.get(key)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(key: str, default: int) -> int:
    """Parse integer env values with fallback."""
    raw = env.get(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _env_float(key: str, default: float) -> float:
    """Parse float env values with fallback."""
    raw = env.get(key)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def _env_choice(key: str, default: str, valid) -> str:
    """Parse an enumerated env value; unknown values fall back to the default."""
    raw = (env.get(key) or "").strip().lower()
    return raw if raw in valid else default


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

VERSION = "0.1.0"
RESULTS_SCHEMA_VERSION = "1.0"

VALID_VARIANTS = ("pl", "ds", "ca", "dsc")
VALID_POLICIES = ("tinylfu", "lru", "lfu")
VALID_HEURISTICS = ("zero", "unmatched_label_bound")
VALID_LOG_FORMATS = ("csv", "xes")

DEFAULT_VARIANT = "dsc"
DEFAULT_PARTITIONS = 3
DEFAULT_WORKERS = 3
DEFAULT_CACHE_CAPACITY = 100
DEFAULT_CACHE_POLICY = "tinylfu"
DEFAULT_HEURISTIC = "zero"
DEFAULT_MAX_RECORDS = 1_000_000
DEFAULT_LAG_SAMPLE_MS = 100

# Count-min sketch shape, relative to cache capacity.
SKETCH_DEPTH = 4
SKETCH_WIDTH_FACTOR = 16
SKETCH_AGING_FACTOR = 10

# Upper bounds (ms) of the per-event latency histogram; a final +inf bucket is implied.
LATENCY_BUCKETS_MS = (0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 500.0)

# ---------------------------------------------------------------------------
# Module-level state (loaded from .env)
# ---------------------------------------------------------------------------

env = load_env()

VARIANT = _env_choice("PREFIXALIGN_VARIANT", DEFAULT_VARIANT, VALID_VARIANTS)
PARTITIONS = _env_int("PREFIXALIGN_PARTITIONS", DEFAULT_PARTITIONS)
WORKERS = _env_int("PREFIXALIGN_WORKERS", DEFAULT_WORKERS)
CACHE_CAPACITY = _env_int("PREFIXALIGN_CACHE_CAPACITY", DEFAULT_CACHE_CAPACITY)
CACHE_POLICY = _env_choice("PREFIXALIGN_CACHE_POLICY", DEFAULT_CACHE_POLICY, VALID_POLICIES)
HEURISTIC = _env_choice("PREFIXALIGN_HEURISTIC", DEFAULT_HEURISTIC, VALID_HEURISTICS)
MAX_RECORDS = _env_int("PREFIXALIGN_MAX_RECORDS", DEFAULT_MAX_RECORDS)
MAX_AGGREGATES = _env_int("PREFIXALIGN_MAX_AGGREGATES", 0)
LAG_SAMPLE_MS = _env_int("PREFIXALIGN_LAG_SAMPLE_MS", DEFAULT_LAG_SAMPLE_MS)
SEED = _env_int("PREFIXALIGN_SEED", 0)
OUT_DIR = env.get("PREFIXALIGN_OUT_DIR", "out") or "out"
EVENT_LOG_ENABLED = _env_bool("PREFIXALIGN_EVENT_LOG", False)
EVENT_LOG_SAMPLE_RATE = min(1.0, max(0.0, _env_float("PREFIXALIGN_EVENT_LOG_SAMPLE_RATE", 1.0)))
DEBUG_CHECKS = _env_bool("PREFIXALIGN_DEBUG", False)

# ---------------------------------------------------------------------------
# Runtime flags (set by the CLI's global-flag pass)
# ---------------------------------------------------------------------------

RUNTIME_QUIET = False
RUNTIME_VERBOSE = False

# ---------------------------------------------------------------------------
# Re-export exceptions for convenience
# ---------------------------------------------------------------------------

from prefixalign.exceptions import CliError, ModelError  # noqa: E402, F401
