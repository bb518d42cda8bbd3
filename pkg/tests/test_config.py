"""Tests for config.py: .env loading and typed env helpers."""

import pytest

from prefixalign import config


@pytest.fixture(autouse=True)
def _clean_environ(monkeypatch):
    for key in config.KNOWN_ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


class TestLoadEnv:
    def test_missing_file(self, tmp_path, monkeypatch):
        monkeypatch.setattr(config, "ENV_PATH", str(tmp_path / ".env"))
        assert config.load_env() == {}

    def test_reads_key_values(self, tmp_path, monkeypatch):
        env_file = tmp_path / ".env"
        env_file.write_text(
            "# comment\nPREFIXALIGN_VARIANT=ca\n\nPREFIXALIGN_WORKERS = 2\nnot a pair\n"
        )
        monkeypatch.setattr(config, "ENV_PATH", str(env_file))
        assert config.load_env() == {"PREFIXALIGN_VARIANT": "ca", "PREFIXALIGN_WORKERS": "2"}

    def test_file_beats_process_env(self, tmp_path, monkeypatch):
        env_file = tmp_path / ".env"
        env_file.write_text("PREFIXALIGN_SEED=1\n")
        monkeypatch.setattr(config, "ENV_PATH", str(env_file))
        monkeypatch.setenv("PREFIXALIGN_SEED", "2")
        monkeypatch.setenv("PREFIXALIGN_OUT_DIR", "elsewhere")
        env = config.load_env()
        assert env["PREFIXALIGN_SEED"] == "1"
        assert env["PREFIXALIGN_OUT_DIR"] == "elsewhere"

    def test_unknown_process_env_ignored(self, tmp_path, monkeypatch):
        monkeypatch.setattr(config, "ENV_PATH", str(tmp_path / ".env"))
        monkeypatch.setenv("PREFIXALIGN_UNRELATED", "x")
        assert "PREFIXALIGN_UNRELATED" not in config.load_env()


class TestEnvHelpers:
    def test_bool(self, monkeypatch):
        monkeypatch.setattr(config, "env", {"A": "yes", "B": "0"})
        assert config._env_bool("A") is True
        assert config._env_bool("B") is False
        assert config._env_bool("C", default=True) is True

    def test_int_fallback(self, monkeypatch):
        monkeypatch.setattr(config, "env", {"A": "12", "B": "twelve", "C": ""})
        assert config._env_int("A", 1) == 12
        assert config._env_int("B", 1) == 1
        assert config._env_int("C", 1) == 1

    def test_float_fallback(self, monkeypatch):
        monkeypatch.setattr(config, "env", {"A": "0.25", "B": "x"})
        assert config._env_float("A", 1.0) == 0.25
        assert config._env_float("B", 1.0) == 1.0

    def test_choice(self, monkeypatch):
        monkeypatch.setattr(config, "env", {"A": " LRU ", "B": "fifo"})
        assert config._env_choice("A", "tinylfu", config.VALID_POLICIES) == "lru"
        assert config._env_choice("B", "tinylfu", config.VALID_POLICIES) == "tinylfu"


class TestConstants:
    def test_default_choices_are_valid(self):
        assert config.DEFAULT_VARIANT in config.VALID_VARIANTS
        assert config.DEFAULT_CACHE_POLICY in config.VALID_POLICIES
        assert config.DEFAULT_HEURISTIC in config.VALID_HEURISTICS

    def test_buckets_ascending(self):
        assert list(config.LATENCY_BUCKETS_MS) == sorted(config.LATENCY_BUCKETS_MS)
