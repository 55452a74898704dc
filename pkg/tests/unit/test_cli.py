import csv
import json
import os
from unittest.mock import patch

import pytest

from fiberacf._logger import ENV_VAR as LOG_LEVEL_ENV_VAR
from fiberacf.cli import EXIT_CONFIG, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, build_parser, main
from fiberacf.config import SEED_ENV_VAR
from fiberacf.validation import Check, ValidationReport


@pytest.fixture
def quick_toml(tmp_path):
    path = tmp_path / "quick.toml"
    path.write_text(
        "[monte_carlo]\ntrials = 200\nsteps = 32\nseed = 9\n\n"
        "[figures]\np_dbm_start = 0.0\np_dbm_stop = 40.0\np_points = 3\n"
    )
    return path


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    monkeypatch.setenv(LOG_LEVEL_ENV_VAR, "off")


def read_csv(path):
    with path.open(newline="") as fh:
        return list(csv.reader(fh))


class TestParser:
    def test_command_required(self):
        """Test that a subcommand is mandatory."""
        assert main([]) == EXIT_USAGE

    def test_unknown_figure(self):
        """Test that figure ids are restricted to 1-8."""
        assert main(["fig", "9"]) == EXIT_USAGE

    def test_help_exits_ok(self, capsys):
        """Test that --help is a successful exit."""
        assert main(["--help"]) == EXIT_OK
        assert "fiberacf" in capsys.readouterr().out

    def test_global_options(self):
        """Test parsing of the shared options."""
        args = build_parser().parse_args(["--seed", "3", "--threads", "2", "--trials", "500", "demo", "fsk"])
        assert (args.seed, args.threads, args.trials, args.name) == (3, 2, 500, "fsk")


class TestCommands:
    def test_stdout_output(self, capsys):
        """Test that without --out the table goes to stdout."""
        assert main(["demo", "fsk"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "m,max_off_diagonal,d_min,union_bound_pe,energy,rate_bps,achievable_rate_bps"
        assert len(lines) == 5

    def test_out_directory_and_manifest(self, tmp_path, quick_toml):
        """Test CSV and manifest files written to --out."""
        out = tmp_path / "run"
        argv = ["--config", str(quick_toml), "--out", str(out), "demo", "infinite-bandwidth"]
        assert main(argv) == EXIT_OK
        rows = read_csv(out / "infinite_bandwidth.csv")
        assert rows[0] == ["p_dbm", "capacity_bps", "limit_bps"]
        assert len(rows) == 4
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == ["fiberacf", *argv]
        assert manifest["outputs"] == ["infinite_bandwidth.csv"]
        assert manifest["seed"] == 9
        assert len(manifest["digest"]) == 64

    def test_seed_environment_wins(self, tmp_path, quick_toml, monkeypatch):
        """Test that FIBERACF_SEED overrides --seed and the config."""
        monkeypatch.setenv(SEED_ENV_VAR, "5")
        out = tmp_path / "run"
        assert main(["--config", str(quick_toml), "--seed", "1", "--out", str(out), "demo", "fsk"]) == EXIT_OK
        assert json.loads((out / "manifest.json").read_text())["seed"] == 5

    def test_acf_command(self, tmp_path):
        """Test the (t, t') grid size and power parsing in dBm."""
        out = tmp_path / "acf"
        argv = ["--out", str(out), "acf", "--power", "20 dBm", "--t-start", "-1", "--t-stop", "1", "--t-step", "1"]
        assert main([*argv, "--tprime", "0"]) == EXIT_OK
        rows = read_csv(out / "acf.csv")
        assert rows[0] == ["t_ps", "tprime_ps", "re_w", "im_w", "abs_db"]
        assert [r[0] for r in rows[1:]] == ["-1", "0", "1"]

    def test_capacity_overlay(self, tmp_path, quick_toml):
        """Test that an overlay CSV is copied next to the capacity table."""
        overlay = tmp_path / "external.csv"
        overlay.write_text("p_dbm,bpshz\n0,1\n")
        out = tmp_path / "cap"
        assert main(["--config", str(quick_toml), "--out", str(out), "capacity", "--overlay", str(overlay)]) == EXIT_OK
        assert (out / "overlay_external.csv").read_text() == overlay.read_text()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["outputs"] == ["capacity.csv", "overlay_external.csv"]

    def test_bounds_with_unit_bandwidth(self, tmp_path, quick_toml):
        """Test receiver bandwidth given with units."""
        out = tmp_path / "bounds"
        assert main(["--config", str(quick_toml), "--out", str(out), "bounds", "--bandwidth", "250 GHz"]) == EXIT_OK
        rows = read_csv(out / "bounds.csv")
        assert {r[2] for r in rows[1:]} == {"lemma1"}

    def test_log_level_option(self, quick_toml):
        """Test that --log-level sets FIBERACF_LOG_LEVEL."""
        assert main(["--config", str(quick_toml), "--log-level", "error", "demo", "fsk"]) == EXIT_OK
        assert os.environ[LOG_LEVEL_ENV_VAR] == "error"


class TestExitCodes:
    def test_bad_quantity(self, capsys):
        """Test that a unit error is a usage error."""
        assert main(["psd", "--power", "5 parsec"]) == EXIT_USAGE
        assert "fiberacf:" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        """Test that an unreadable config file is a configuration error."""
        assert main(["--config", str(tmp_path / "missing.toml"), "demo", "fsk"]) == EXIT_CONFIG
        assert "configuration error" in capsys.readouterr().err

    def test_bad_seed_environment(self, monkeypatch):
        """Test that a malformed FIBERACF_SEED is a configuration error."""
        monkeypatch.setenv(SEED_ENV_VAR, "forty-two")
        assert main(["demo", "fsk"]) == EXIT_CONFIG

    def test_validation_failure(self, tmp_path, capsys):
        """Test exit code 3 and the failed check listing, with the report still written."""
        failing = ValidationReport("special", [Check("kappa", False, -0.1, "28.7 vs 30")])
        out = tmp_path / "val"
        with patch("fiberacf.cli.run_suite", return_value=failing):
            assert main(["--out", str(out), "validate", "special"]) == EXIT_VALIDATION
        assert "FAILED special: kappa: 28.7 vs 30" in capsys.readouterr().err
        rows = read_csv(out / "validate_special.csv")
        assert rows[1][:3] == ["special", "kappa", "false"]

    def test_validation_success(self, tmp_path):
        """Test exit code 0 when every check passes."""
        passing = ValidationReport("special", [Check("kappa", True, 0.1)])
        with patch("fiberacf.cli.run_suite", return_value=passing):
            assert main(["--out", str(tmp_path), "validate", "special"]) == EXIT_OK
