"""Run lint, format, type and test checks and print one JSON report.

Usage:
    py scripts/quality_gate.py              # ruff, mypy, pytest (realtime tests deselected)
    py scripts/quality_gate.py --realtime   # include wall-clock replay tests
    py scripts/quality_gate.py --skip-tests # static checks only
    py scripts/quality_gate.py --fix        # ruff --fix and ruff format first
    py scripts/quality_gate.py --coverage   # pytest with coverage.xml
    py scripts/quality_gate.py --acceptance # also run scripts/acceptance.py
    py scripts/quality_gate.py --audit      # pip-audit CVE scan (network)
    py scripts/quality_gate.py --mypy-only  # mypy with raw output
"""

import argparse
import importlib.util
import json
import re
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

PACKAGE = "prefixalign"
MYPY_TARGETS = [f"{PACKAGE}/"]
FAILURE_TAIL = 4000


def _run(cmd: list[str], timeout: int = 300) -> subprocess.CompletedProcess:
    return subprocess.run(
        cmd,
        capture_output=True,
        text=True,
        encoding="utf-8",
        errors="replace",
        cwd=str(ROOT),
        timeout=timeout,
    )


def _tool(*args: str) -> list[str]:
    return [sys.executable, "-m", *args]


def _finish(r: subprocess.CompletedProcess, t0: float, **fields: object) -> dict:
    result: dict = {"status": "pass" if r.returncode == 0 else "fail", **fields}
    result["duration_s"] = round(time.monotonic() - t0, 1)
    if r.returncode != 0:
        text = "\n".join(part for part in (r.stdout.strip(), r.stderr.strip()) if part)
        result["output"] = text[-FAILURE_TAIL:]
    return result


def _count(lines: str, pattern: str) -> int:
    return sum(1 for line in lines.splitlines() if re.search(pattern, line))


def check_ruff_lint(fix: bool = False) -> dict:
    t0 = time.monotonic()
    if fix:
        _run(_tool("ruff", "check", "--fix", "."))
    r = _run(_tool("ruff", "check", "."))
    return _finish(r, t0, errors=_count(r.stdout, r"^\S+:\d+:\d+:"))


def check_ruff_format(fix: bool = False) -> dict:
    t0 = time.monotonic()
    if fix:
        _run(_tool("ruff", "format", "."))
    r = _run(_tool("ruff", "format", "--check", "."))
    return _finish(r, t0, files_to_reformat=_count(r.stdout + r.stderr, r"^Would reformat"))


def check_mypy() -> dict:
    t0 = time.monotonic()
    r = _run(_tool("mypy", *MYPY_TARGETS))
    return _finish(r, t0, errors=_count(r.stdout, r": error:"))


def _pytest_totals(stdout: str) -> dict[str, int]:
    """Read passed/failed/errors/deselected from pytest's closing summary line."""
    totals = {"passed": 0, "failed": 0, "errors": 0, "deselected": 0}
    for line in reversed(stdout.strip().splitlines()):
        found = False
        for key, word in (
            ("passed", "passed"),
            ("failed", "failed"),
            ("errors", "errors?"),
            ("deselected", "deselected"),
        ):
            m = re.search(rf"(\d+)\s+{word}\b", line)
            if m:
                totals[key] = int(m.group(1))
                found = True
        if found:
            break
    return totals


def check_pytest(coverage: bool = False, realtime: bool = False) -> dict:
    t0 = time.monotonic()
    basetemp = ROOT / ".tmp" / "quality-gate" / f"pytest-{time.strftime('%Y%m%d%H%M%S')}"
    basetemp.parent.mkdir(parents=True, exist_ok=True)
    cmd = _tool("pytest", "tests/", "-q", "--no-header", "--tb=short", "--basetemp", str(basetemp))
    if not realtime:
        cmd.extend(["-m", "not realtime"])
    if coverage:
        cmd.extend([f"--cov={PACKAGE}", "--cov-report=xml"])
    r = _run(cmd, timeout=900)
    return _finish(
        r,
        t0,
        **_pytest_totals(r.stdout),
        realtime=realtime,
        coverage=coverage,
        basetemp=str(basetemp.relative_to(ROOT)),
    )


def check_acceptance(realtime: bool = False) -> dict:
    """Corpus-scale exactness and performance checks from scripts/acceptance.py."""
    t0 = time.monotonic()
    cmd = [sys.executable, "scripts/acceptance.py"]
    if realtime:
        cmd.append("--realtime")
    r = _run(cmd, timeout=1800 if realtime else 900)
    failed: list[str] = []
    try:
        report = json.loads(r.stdout or "{}")
        checks = report.get("checks", {})
        failed = sorted(name for name, check in checks.items() if check.get("status") == "fail")
    except (json.JSONDecodeError, AttributeError):
        pass
    return _finish(r, t0, failed_checks=failed)


def check_pip_audit() -> dict:
    """Scan installed packages with pip-audit. Skips when the tool is missing."""
    t0 = time.monotonic()
    if importlib.util.find_spec("pip_audit") is None:
        return {"status": "skip", "reason": "pip-audit not installed (py -m pip install .[dev])"}
    r = _run(_tool("pip_audit", "--progress-spinner", "off", "-f", "json"))
    affected: list[str] = []
    try:
        for dep in json.loads(r.stdout or "{}").get("dependencies", []):
            ids = [v.get("id", "?") for v in dep.get("vulns", [])]
            if ids:
                affected.append(f"{dep.get('name')} {dep.get('version')}: {', '.join(ids)}")
    except (json.JSONDecodeError, AttributeError):
        pass
    result = _finish(r, t0, affected=affected)
    if affected:
        result["status"] = "fail"
    return result


def main() -> None:
    parser = argparse.ArgumentParser(description="Run prefixalign quality checks")
    parser.add_argument("--skip-tests", action="store_true", help="Skip pytest")
    parser.add_argument("--realtime", action="store_true", help="Include wall-clock tests")
    parser.add_argument("--fix", action="store_true", help="Apply ruff fixes first")
    parser.add_argument("--coverage", action="store_true", help="Write coverage.xml")
    parser.add_argument("--acceptance", action="store_true", help="Run acceptance workloads")
    parser.add_argument("--audit", action="store_true", help="Run pip-audit CVE scan")
    parser.add_argument("--mypy-only", action="store_true", help="Run just mypy (raw output)")
    args = parser.parse_args()

    if args.mypy_only:
        sys.exit(subprocess.run(_tool("mypy", *MYPY_TARGETS), cwd=str(ROOT)).returncode)

    steps = [
        ("ruff_lint", lambda: check_ruff_lint(fix=args.fix)),
        ("ruff_format", lambda: check_ruff_format(fix=args.fix)),
        ("mypy", check_mypy),
    ]
    if not args.skip_tests:
        steps.append(
            ("pytest", lambda: check_pytest(coverage=args.coverage, realtime=args.realtime))
        )
    if args.acceptance:
        steps.append(("acceptance", lambda: check_acceptance(realtime=args.realtime)))
    if args.audit:
        steps.append(("pip_audit", check_pip_audit))

    t0 = time.monotonic()
    checks: dict[str, dict] = {}
    if args.skip_tests:
        checks["pytest"] = {"status": "skip", "reason": "--skip-tests"}
    for name, step in steps:
        print(f"Running {name}...", file=sys.stderr)
        checks[name] = step()

    failed = [name for name, check in checks.items() if check["status"] not in ("pass", "skip")]
    report = {
        "overall": "fail" if failed else "pass",
        "failed": failed,
        "checks": checks,
        "total_duration_s": round(time.monotonic() - t0, 1),
    }
    print(json.dumps(report, indent=2))
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
