"""
prefixalign: streaming conformance checking with incremental prefix-alignments
"""

import argparse
import json
import sys

from prefixalign import config
from prefixalign.commands import cmd_align, cmd_generate, cmd_replay, cmd_validate
from prefixalign.exceptions import CliError, ModelError

HELP_TEXT = """\
Usage: prefixalign <command> [args...]

Global flags:
  --format table          Output as readable text instead of JSON (default: json)
  --json                  Force JSON output (same as --format json)
  --quiet, -q             Suppress warnings
  --verbose, -v           Enable structured engine logging on stderr
  --version               Show version number

Commands:
  replay                  - Stream an event log through the engine
    --model <file>          Reference model (PNML); optional with --synthetic
    --log <file>            Event log (case,activity,timestamp)
    --log-format <fmt>      csv (default) or xes
    --synthetic <tree>      Generate the log from a process tree instead
    --cases <n>             Synthetic cases (default: 100)
    --noise <p>             Synthetic noise probability per event (default: 0)
    --variant <v>           pl, ds, ca, dsc (default: dsc)
    --partitions <n>        Topic partitions (default: 3)
    --workers <n>           Consumer workers, at most --partitions (default: 3)
    --cache-capacity <n>    Prefixes cached per worker, 0 disables (default: 100)
    --cache-policy <p>      tinylfu, lru, lfu (default: tinylfu)
    --heuristic <h>         zero, unmatched_label_bound (default: zero)
    --duration <s>          Replay duration in seconds (default: 600)
    --max-speed             Produce events back-to-back
    --seed <n>              Random seed for synthetic logs (default: 0)
    --lag-sample-ms <n>     Consumer lag sampling period (default: 100)
    --max-records <n>       Search markings per case before giving up
    --max-aggregates <n>    Cases with search state per worker, 0 = unbounded
    --out <dir>             Output directory (default: out)
  align                   - Optimal alignment of one trace
    --model <file>          Reference model (PNML)
    --trace <a,b,c>         Comma-separated activities
    --mode <m>              prefix (default) or full
    --heuristic <h>         zero, unmatched_label_bound
    --max-records <n>       Search markings before giving up
  generate <tree>         - Write a synthetic log and its model
    --cases <n>             Number of cases (default: 100)
    --noise <p>             Noise probability per event (default: 0)
    --seed <n>              Random seed
    --out <dir>             Output directory (default: out)
  validate                - Check that a model is a WF-net
    --model <file>          Reference model (PNML)
  version                 - Show version number
"""


# ---------------------------------------------------------------------------
# Global flag extraction (before argparse, so --format works after subcommand)
# ---------------------------------------------------------------------------


def _extract_global_flags(argv):
    """Pull global flags from anywhere in argv.

    Returns (format_str, quiet, verbose, remaining_argv). Handles --version directly.
    """
    fmt = "json"
    quiet = False
    verbose = False
    remaining = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--version":
            print(f"prefixalign {config.VERSION}")
            sys.exit(0)
        elif arg == "--json":
            fmt = "json"
        elif arg in ("--quiet", "-q"):
            quiet = True
        elif arg in ("--verbose", "-v"):
            verbose = True
        elif arg == "--format" and i + 1 < len(argv):
            fmt = argv[i + 1]
            if fmt not in ("json", "table"):
                raise CliError(f"[ERROR] Invalid format '{fmt}'. Use: json, table")
            i += 1
        else:
            remaining.append(arg)
        i += 1
    if quiet and verbose:
        raise CliError("[ERROR] --quiet and --verbose are mutually exclusive.")
    return fmt, quiet, verbose, remaining


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


class _SubcommandParser(argparse.ArgumentParser):
    """Subparser that raises CliError instead of printing full help text."""

    def error(self, message):
        raise CliError(f"[ERROR] {message}")


def _positive_int(value):
    try:
        parsed = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("must be a positive integer") from exc
    if parsed <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return parsed


def _non_negative_int(value):
    try:
        parsed = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("must be a non-negative integer") from exc
    if parsed < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return parsed


def _probability(value):
    try:
        parsed = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("must be a number within [0, 1]") from exc
    if not 0.0 <= parsed <= 1.0:
        raise argparse.ArgumentTypeError("must be a number within [0, 1]")
    return parsed


def _positive_float(value):
    try:
        parsed = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("must be a positive number") from exc
    if parsed <= 0:
        raise argparse.ArgumentTypeError("must be a positive number")
    return parsed


def build_parser():
    parser = _SubcommandParser(
        prog="prefixalign",
        description="Streaming conformance checking with incremental prefix-alignments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        add_help=False,
    )
    parser.add_argument("--help", "-h", action="store_true", dest="show_help")
    sub = parser.add_subparsers(dest="command", parser_class=_SubcommandParser)

    # --- replay ---
    p = sub.add_parser("replay")
    p.add_argument("--model")
    p.add_argument("--log")
    p.add_argument("--log-format", choices=list(config.VALID_LOG_FORMATS))
    p.add_argument("--synthetic", help="Process tree, e.g. \"seq(a, xor(b, c))\"")
    p.add_argument("--cases", type=_positive_int)
    p.add_argument("--noise", type=_probability)
    p.add_argument("--variant", choices=list(config.VALID_VARIANTS))
    p.add_argument("--partitions", type=_positive_int)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--cache-capacity", type=_non_negative_int)
    p.add_argument("--cache-policy", choices=list(config.VALID_POLICIES))
    p.add_argument("--heuristic", choices=list(config.VALID_HEURISTICS))
    p.add_argument("--duration", type=_positive_float)
    p.add_argument("--max-speed", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--lag-sample-ms", type=_positive_int)
    p.add_argument("--max-records", type=_positive_int)
    p.add_argument("--max-aggregates", type=_non_negative_int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_replay)

    # --- align ---
    p = sub.add_parser("align")
    p.add_argument("--model", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--mode", choices=["prefix", "full"], default="prefix")
    p.add_argument("--heuristic", choices=list(config.VALID_HEURISTICS))
    p.add_argument("--max-records", type=_positive_int)
    p.set_defaults(func=cmd_align)

    # --- generate ---
    p = sub.add_parser("generate")
    p.add_argument("tree", help="Process tree, e.g. \"seq(a, xor(b, c))\"")
    p.add_argument("--cases", type=_non_negative_int, default=100)
    p.add_argument("--noise", type=_probability, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    # --- validate ---
    p = sub.add_parser("validate")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_validate)

    # --- version (bare word) ---
    sub.add_parser("version").set_defaults(func=None)

    return parser


# ---------------------------------------------------------------------------
# Command dispatch
# ---------------------------------------------------------------------------


def _emit_cli_error(err, fmt):
    msg = str(err)
    if fmt == "json":
        error_detail = {
            "type": "error" if msg.startswith("[ERROR]") else "cli_error",
            "message": msg,
            "exit_code": getattr(err, "exit_code", 1),
        }
        recovery = getattr(err, "recovery_hint", None)
        if recovery:
            error_detail["recovery"] = recovery
        violations = getattr(err, "violations", None)
        if violations:
            error_detail["violations"] = violations
        payload = {
            "ok": False,
            "schema_version": config.RESULTS_SCHEMA_VERSION,
            "error_code": "MODEL_ERROR" if isinstance(err, ModelError) else "CLI_ERROR",
            "error": error_detail,
        }
        print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
        return
    print(msg, file=sys.stderr)
    recovery = getattr(err, "recovery_hint", None)
    if recovery:
        print(f"  hint: {recovery}", file=sys.stderr)


def main(argv=None):
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", errors="replace")

    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        print(HELP_TEXT)
        sys.exit(0)

    fmt = "json"
    try:
        fmt, quiet, verbose, remaining_argv = _extract_global_flags(argv)
        config.RUNTIME_QUIET = quiet
        config.RUNTIME_VERBOSE = verbose
        if verbose:
            config.EVENT_LOG_ENABLED = True

        if not remaining_argv:
            print(HELP_TEXT)
            sys.exit(0)

        parser = build_parser()
        ns = parser.parse_args(remaining_argv)
        ns.format = fmt  # inject global format flag

        if ns.show_help or not ns.command:
            print(HELP_TEXT)
            sys.exit(0)

        if ns.command == "version":
            print(f"prefixalign {config.VERSION}")
            sys.exit(0)

        handler = getattr(ns, "func", None)
        if handler:
            handler(ns)
        else:
            raise CliError(f"[ERROR] Unknown command: {ns.command}")

    except CliError as e:
        _emit_cli_error(e, fmt)
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
