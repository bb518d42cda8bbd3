"""Tests for cli.py: global flags, argparse wiring, error envelopes."""

import json

import pytest

from prefixalign import config
from prefixalign.cli import _emit_cli_error, _extract_global_flags, build_parser, main
from prefixalign.exceptions import CliError, ModelError

# ---------------------------------------------------------------------------
# _extract_global_flags
# ---------------------------------------------------------------------------


class TestExtractGlobalFlags:
    def test_no_flags(self):
        fmt, quiet, verbose, remaining = _extract_global_flags(["replay"])
        assert fmt == "json"
        assert quiet is False
        assert verbose is False
        assert remaining == ["replay"]

    def test_format_after_command(self):
        fmt, _, _, remaining = _extract_global_flags(["align", "--format", "table"])
        assert fmt == "table"
        assert remaining == ["align"]

    def test_format_between_args(self):
        fmt, _, _, remaining = _extract_global_flags(
            ["replay", "--variant", "ca", "--format", "table", "--max-speed"]
        )
        assert fmt == "table"
        assert remaining == ["replay", "--variant", "ca", "--max-speed"]

    def test_json_flag(self):
        fmt, _, _, _ = _extract_global_flags(["--format", "table", "--json", "replay"])
        assert fmt == "json"

    def test_quiet_and_verbose_short_forms(self):
        _, quiet, _, _ = _extract_global_flags(["-q", "replay"])
        _, _, verbose, _ = _extract_global_flags(["replay", "-v"])
        assert quiet is True
        assert verbose is True

    def test_quiet_with_verbose_rejected(self):
        with pytest.raises(CliError, match="mutually exclusive"):
            _extract_global_flags(["-q", "-v", "replay"])

    def test_invalid_format(self):
        with pytest.raises(CliError, match="Invalid format"):
            _extract_global_flags(["--format", "csv", "replay"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            _extract_global_flags(["--version"])
        assert exc_info.value.code == 0
        assert capsys.readouterr().out.strip() == f"prefixalign {config.VERSION}"


# ---------------------------------------------------------------------------
# build_parser
# ---------------------------------------------------------------------------


class TestBuildParser:
    def test_replay_options(self):
        ns = build_parser().parse_args(
            [
                "replay",
                "--synthetic",
                "seq(a, b)",
                "--variant",
                "ca",
                "--partitions",
                "4",
                "--workers",
                "2",
                "--cache-capacity",
                "0",
                "--max-speed",
            ]
        )
        assert ns.command == "replay"
        assert ns.variant == "ca"
        assert (ns.partitions, ns.workers, ns.cache_capacity) == (4, 2, 0)
        assert ns.max_speed is True
        assert ns.duration is None

    def test_unknown_variant(self):
        with pytest.raises(CliError, match="invalid choice"):
            build_parser().parse_args(["replay", "--variant", "fast"])

    def test_non_positive_workers(self):
        with pytest.raises(CliError, match="positive integer"):
            build_parser().parse_args(["replay", "--workers", "0"])

    def test_noise_range(self):
        with pytest.raises(CliError, match=r"\[0, 1\]"):
            build_parser().parse_args(["replay", "--noise", "1.5"])

    def test_align_requires_trace(self):
        with pytest.raises(CliError, match="--trace"):
            build_parser().parse_args(["align", "--model", "m.pnml"])

    def test_generate_defaults(self):
        ns = build_parser().parse_args(["generate", "seq(a, b)"])
        assert ns.cases == 100
        assert ns.noise == 0.0


# ---------------------------------------------------------------------------
# _emit_cli_error
# ---------------------------------------------------------------------------


class TestEmitCliError:
    def test_json_envelope(self, capsys):
        _emit_cli_error(CliError("[ERROR] bad", recovery_hint="do x"), "json")
        payload = json.loads(capsys.readouterr().err)
        assert payload["ok"] is False
        assert payload["schema_version"] == config.RESULTS_SCHEMA_VERSION
        assert payload["error_code"] == "CLI_ERROR"
        assert payload["error"] == {
            "type": "error",
            "message": "[ERROR] bad",
            "exit_code": 1,
            "recovery": "do x",
        }

    def test_model_error_carries_violations(self, capsys):
        _emit_cli_error(ModelError("[ERROR] m: not a WF-net", violations=["v1"]), "json")
        payload = json.loads(capsys.readouterr().err)
        assert payload["error_code"] == "MODEL_ERROR"
        assert payload["error"]["exit_code"] == 2
        assert payload["error"]["violations"] == ["v1"]

    def test_table_format_is_plain_text(self, capsys):
        _emit_cli_error(CliError("[ERROR] bad", recovery_hint="do x"), "table")
        assert capsys.readouterr().err == "[ERROR] bad\n  hint: do x\n"


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------


class TestMain:
    def test_no_args_prints_help(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 0
        assert "Usage: prefixalign" in capsys.readouterr().out

    def test_version_command(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["version"])
        assert exc_info.value.code == 0
        assert config.VERSION in capsys.readouterr().out

    def test_cli_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["replay", "--synthetic", "a", "--partitions", "2", "--workers", "3"])
        assert exc_info.value.code == 1
        payload = json.loads(capsys.readouterr().err)
        assert "cannot exceed" in payload["error"]["message"]

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["frobnicate"])
        assert exc_info.value.code == 1

    def test_missing_model_exit_code(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["align", "--model", str(tmp_path / "none.pnml"), "--trace", "a"])
        assert exc_info.value.code == 2

    def test_verbose_enables_engine_log(self, n1_pnml, capsys):
        main(["-v", "align", "--model", n1_pnml, "--trace", "a"])
        assert config.EVENT_LOG_ENABLED is True
        assert config.RUNTIME_VERBOSE is True
