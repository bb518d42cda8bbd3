"""Tests for scripts/acceptance.py check logic, loaded by path (scripts/ is not a package)."""

import importlib.util
from pathlib import Path
from types import SimpleNamespace

import pytest

from prefixalign import config
from prefixalign.metrics import MetricsRegistry


def _load_acceptance_module():
    path = Path(__file__).resolve().parent.parent / "scripts" / "acceptance.py"
    spec = importlib.util.spec_from_file_location("prefixalign_acceptance_test", path)
    assert spec is not None
    assert spec.loader is not None
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture
def acceptance():
    return _load_acceptance_module()


def _capture_runs(acceptance, monkeypatch):
    """Replace run_log with a recorder; returns the list of configs it saw."""
    seen = []

    def fake_run_log(log, model, cfg):
        seen.append(cfg)
        return SimpleNamespace(registry=MetricsRegistry(cfg.partitions), aborted=False, error=None)

    monkeypatch.setattr(acceptance, "run_log", fake_run_log)
    return seen


# ---------------------------------------------------------------------------
# Corpus: search work
# ---------------------------------------------------------------------------


class TestCorpusCheck:
    def test_reports_incremental_and_restart_expansions(self, acceptance):
        report = acceptance.check_corpus(seed=2, trees=4, traces_per_tree=2)
        assert report["status"] == "pass"
        assert report["work_bound_violations"] == []
        assert 0 < report["expanded_incremental"] <= report["expanded_from_scratch"]

    def test_incremental_expansions_stay_within_restarts(self, acceptance):
        model = acceptance.to_wfnet(acceptance.parse("seq(a, xor(b, c), and(d, e))"))
        trace = ["a", "x", "c", "e", "d"]
        restarts = sum(
            acceptance._from_scratch(model, trace[: k + 1])[1] for k in range(len(trace))
        )
        assert acceptance._incremental_expanded(model, trace) <= restarts


# ---------------------------------------------------------------------------
# Drain scaling
# ---------------------------------------------------------------------------


class TestScalingCheck:
    def test_one_worker_per_partition_threaded(self, acceptance, monkeypatch):
        seen = _capture_runs(acceptance, monkeypatch)
        acceptance._drain_seconds(None, None, 4, repeats=2)
        assert len(seen) == 2
        assert all(cfg.threaded and cfg.partitions == cfg.workers == 4 for cfg in seen)

    def test_aborted_run_raises(self, acceptance, monkeypatch):
        monkeypatch.setattr(
            acceptance,
            "run_log",
            lambda log, model, cfg: SimpleNamespace(aborted=True, error="worker 0: boom"),
        )
        with pytest.raises(RuntimeError, match="boom"):
            acceptance._drain_seconds(None, None, 1, repeats=1)

    @pytest.mark.parametrize(
        ("single", "multi", "status"),
        [(2.0, 1.5, "pass"), (2.0, 2.05, "pass"), (2.0, 3.0, "fail")],
    )
    def test_compares_against_single_worker(self, acceptance, monkeypatch, single, multi, status):
        times = {1: single, 4: multi}
        monkeypatch.setattr(
            acceptance, "_drain_seconds", lambda log, model, partitions, repeats: times[partitions]
        )
        report = acceptance.check_scaling(seed=0)
        assert report["status"] == status
        assert report["drain_s"] == {"1x1": single, "4x4": multi}


# ---------------------------------------------------------------------------
# Performance trend
# ---------------------------------------------------------------------------


class TestPerformanceCheck:
    def test_runs_at_default_cache_capacity(self, acceptance, monkeypatch):
        seen = _capture_runs(acceptance, monkeypatch)
        acceptance.check_performance(seed=0)
        assert [cfg.variant for cfg in seen] == list(acceptance.VARIANTS)
        assert {cfg.cache_capacity for cfg in seen} == {config.DEFAULT_CACHE_CAPACITY}
