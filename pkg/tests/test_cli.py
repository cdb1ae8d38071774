import json
import math
import os

import pytest

from rotor_ratchet.cli import (
    EXIT_ENGINE,
    EXIT_OK,
    EXIT_USAGE,
    build_parser,
    main,
)
from rotor_ratchet.io import (
    read_collapse_csv,
    read_distribution_csv,
    read_energy_csv,
    read_grid_csv,
    read_scaling_csv,
    read_trajectory_csv,
)


def run_cli(tmp_path, *argv):
    cwd = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(list(argv))
    finally:
        os.chdir(cwd)


class TestParsing:
    def test_fig1_flags_build_a_valid_spec(self):
        parser = build_parser()
        args = parser.parse_args(
            [
                "ratchet",
                "--phi-d", "1.8",
                "--epsilon", "0.18",
                "--ell", "1",
                "--gamma", "-1.5708",
                "--beta", "0.5",
                "--kicks", "40",
                "--engine", "quantum",
            ]
        )
        assert args.command == "ratchet"
        assert args.engine == "quantum"
        assert args.phi_d == 1.8

    def test_scaling_curve_flags(self):
        args = build_parser().parse_args(["scaling-curve", "--x-max", "20", "--steps", "401"])
        assert args.x_max == 20.0
        assert args.steps == 401

    def test_help_names_the_model_parameters(self):
        import argparse

        parser = build_parser()
        sub_action = next(
            a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
        )
        ratchet_help = sub_action.choices["ratchet"].format_help()
        for flag in ("--phi-d", "--epsilon", "--ell", "--gamma", "--beta"):
            assert flag in ratchet_help

    def test_unknown_flag_is_a_usage_error(self, tmp_path):
        assert run_cli(tmp_path, "ratchet", "--phi-d", "1.8", "--frobnicate") == EXIT_USAGE

    def test_negative_phi_d_is_a_usage_error(self, tmp_path, capsys):
        code = run_cli(tmp_path, "ratchet", "--phi-d", "-1")
        assert code == EXIT_USAGE
        assert "phi-d must be positive" in capsys.readouterr().err

    def test_missing_command_is_a_usage_error(self, tmp_path):
        assert run_cli(tmp_path) == EXIT_USAGE


class TestRuns:
    def test_scaling_curve_csv(self, tmp_path):
        code = run_cli(tmp_path, "scaling-curve", "--x-max", "2", "--steps", "41", "--quad-n", "256", "--dt", "0.01")
        assert code == EXIT_OK
        comments, rows = read_scaling_csv(tmp_path / "scaling_curve.csv")
        assert len(rows) == 41
        assert rows[0] == [0.0, 0.0, 0.5]

    def test_ratchet_trajectory_csv(self, tmp_path):
        code = run_cli(
            tmp_path,
            "ratchet", "--phi-d", "1.8", "--epsilon", "0.18", "--ell", "1",
            "--gamma", "-1.5708", "--beta", "0.5", "--kicks", "10",
            "--ensemble-n", "256",
        )
        assert code == EXIT_OK
        _, rows = read_trajectory_csv(tmp_path / "trajectory.csv")
        assert len(rows) == 11
        assert rows[0][0] == 0.0
        assert rows[0][4] is None  # scaled current undefined at q = 0

    def test_quantum_distribution_csv(self, tmp_path):
        code = run_cli(
            tmp_path,
            "quantum", "--phi-d", "1.8", "--epsilon", "0.18", "--ell", "1",
            "--gamma", "-1.5708", "--beta", "0.5", "--kicks", "3",
        )
        assert code == EXIT_OK
        _, rows = read_distribution_csv(tmp_path / "distributions.csv")
        by_q = {}
        for q, p, prob in rows:
            by_q.setdefault(q, 0.0)
            by_q[q] += prob
        assert set(by_q) == {0.0, 1.0, 2.0, 3.0}
        assert all(abs(total - 1.0) < 1e-9 for total in by_q.values())

    def test_tau_scan_metadata_header(self, tmp_path):
        code = run_cli(
            tmp_path,
            "tau-scan", "--taus", "0.3,6.0", "--phi-d", "1.8", "--kicks", "4",
        )
        assert code == EXIT_OK
        comments, rows = read_grid_csv(tmp_path / "tau_scan.csv")
        assert any(c.startswith("engine=quantum") for c in comments)
        assert any(c.startswith("seed=") for c in comments)
        assert len(rows) == 8

    def test_collapse_and_energy_runs(self, tmp_path):
        assert run_cli(
            tmp_path,
            "collapse", "--combos", "1.8:0.18,0.9:0.36", "--kicks", "5",
            "--ensemble-n", "128",
        ) == EXIT_OK
        _, rows = read_collapse_csv(tmp_path / "collapse.csv")
        assert len(rows) == 10
        assert run_cli(
            tmp_path,
            "energy-collapse", "--combos", "1.8:0.18,0.9:0.36", "--kicks", "5",
            "--ensemble-n", "128",
        ) == EXIT_OK
        _, rows = read_energy_csv(tmp_path / "energy_collapse.csv")
        assert len(rows) == 10

    def test_json_format(self, tmp_path):
        code = run_cli(
            tmp_path,
            "scaling-curve", "--x-max", "1", "--steps", "11", "--quad-n", "256",
            "--dt", "0.01", "--format", "json", "--output", "curve.json",
        )
        assert code == EXIT_OK
        payload = json.loads((tmp_path / "curve.json").read_text())
        assert payload["columns"] == ["x", "F", "F_over_x"]
        assert len(payload["rows"]) == 11

    def test_gamma_deg_flag(self, tmp_path):
        code = run_cli(
            tmp_path,
            "ratchet", "--phi-d", "1.8", "--epsilon", "0.18", "--gamma-deg", "-90",
            "--kicks", "2", "--ensemble-n", "128", "--output", "deg.csv",
        )
        assert code == EXIT_OK
        _, rows_deg = read_trajectory_csv(tmp_path / "deg.csv")
        run_cli(
            tmp_path,
            "ratchet", "--phi-d", "1.8", "--epsilon", "0.18",
            "--gamma", str(-math.pi / 2), "--kicks", "2", "--ensemble-n", "128",
            "--output", "rad.csv",
        )
        _, rows_rad = read_trajectory_csv(tmp_path / "rad.csv")
        assert rows_deg == rows_rad


class TestFailures:
    def test_tiny_basis_reports_leakage_and_exits_2(self, tmp_path, capsys):
        code = run_cli(
            tmp_path,
            "quantum", "--phi-d", "1.8", "--epsilon", "0.18", "--kicks", "30",
            "--basis-halfwidth", "10",
        )
        assert code == EXIT_ENGINE
        assert "leakage" in capsys.readouterr().err

    def test_no_partial_file_on_engine_failure(self, tmp_path):
        run_cli(
            tmp_path,
            "quantum", "--phi-d", "1.8", "--epsilon", "0.18", "--kicks", "30",
            "--basis-halfwidth", "10", "--output", "dist.csv",
        )
        assert not (tmp_path / "dist.csv").exists()
        assert not [p for p in os.listdir(tmp_path) if p.endswith(".part")]

    def test_missing_output_directory_is_a_usage_error(self, tmp_path):
        code = run_cli(
            tmp_path,
            "scaling-curve", "--x-max", "1", "--steps", "5", "--quad-n", "256",
            "--dt", "0.01", "--output", "nowhere/curve.csv",
        )
        assert code == EXIT_USAGE


class TestConfig:
    def test_config_supplies_defaults_and_flags_override(self, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text(
            "phi_d=1.8\nepsilon=0.18\nell=1\ngamma=-1.5707963\nbeta=0.5\n"
            "kicks=4\nensemble_n=128\noutput=from_config.csv\n"
        )
        code = run_cli(tmp_path, "ratchet", "--config", str(config))
        assert code == EXIT_OK
        assert (tmp_path / "from_config.csv").exists()

        code = run_cli(
            tmp_path, "ratchet", "--config", str(config), "--kicks", "6",
            "--output", "flag_wins.csv",
        )
        assert code == EXIT_OK
        _, rows = read_trajectory_csv(tmp_path / "flag_wins.csv")
        assert len(rows) == 7

    def test_unknown_config_key_is_a_usage_error(self, tmp_path, capsys):
        config = tmp_path / "bad.conf"
        config.write_text("phi=1.8\n")
        assert run_cli(tmp_path, "ratchet", "--config", str(config)) == EXIT_USAGE
        assert "unknown config key" in capsys.readouterr().err


class TestDeterminism:
    def test_identical_bytes_across_runs_and_threads(self, tmp_path):
        argv = [
            "tau-scan", "--taus", "0.3,3.0,6.0", "--phi-d", "1.8", "--kicks", "4",
            "--seed", "7",
        ]
        run_cli(tmp_path, *argv, "--output", "a.csv", "--threads", "1")
        run_cli(tmp_path, *argv, "--output", "b.csv", "--threads", "4")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
