"""Tests for CLI functionality."""

import csv
import json
import math
import os

import pytest
from click.testing import CliRunner

from delaytron.cli import cli, gates, main

HALF_PI = "1.5707963267948966"


def _rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


class TestCLI:
    """Test cases for CLI commands."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()
        self.test_dir = os.path.dirname(os.path.abspath(__file__))
        self.fixtures_dir = os.path.join(self.test_dir, "fixtures")

    def test_cli_help(self):
        """Test CLI help command."""
        result = self.runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        assert "Delaytron" in result.output
        for command in ("qdce", "ea-qdce", "run", "visibility", "compare-hv", "hv-mc", "circuit", "gates"):
            assert command in result.output

    def test_cli_version(self):
        """Test CLI version command."""
        result = self.runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert "0.1.0" in result.output

    def test_gates_command(self):
        """Test gate listing command."""
        result = self.runner.invoke(gates)

        assert result.exit_code == 0
        assert "Supported Gates" in result.output
        assert "CH (targets=1, controls=1, params=0)" in result.output
        assert "U3 (targets=1, controls=0, params=3)" in result.output
        assert "Total: 6 gates supported" in result.output

    def test_circuit_json(self):
        result = self.runner.invoke(cli, ["circuit", "--alpha", "0.5", "--phi", "1.0"])

        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["scheme"] == "QDCE"
        assert document["parameters"] == {"alpha": 0.5, "phi": 1.0}

    def test_circuit_summary(self):
        result = self.runner.invoke(cli, ["circuit", "--scheme", "EA-QDCE", "--summary"])

        assert result.exit_code == 0
        assert "Circuit Summary (EA-QDCE)" in result.output
        assert "Qubits: 3" in result.output
        assert "Depth: 3" in result.output
        assert "Physical Qubits: q[8], q[9], q[10]" in result.output

    def test_circuit_degrees(self):
        result = self.runner.invoke(cli, ["circuit", "--alpha", "90", "--degrees"])

        assert result.exit_code == 0
        assert json.loads(result.output)["parameters"]["alpha"] == pytest.approx(math.pi / 2)


class TestSweepCommands:
    """Test cases for the sweep commands."""

    def setup_method(self):
        self.runner = CliRunner()
        self.fixtures_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

    def test_qdce_writes_outputs(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli,
                [
                    "qdce",
                    "--alpha", "0",
                    "--alpha", HALF_PI,
                    "--phi-steps", "5",
                    "--out", "qdce.csv",
                    "--svg", "qdce.svg",
                    "--heatmap", "surface.svg",
                ],
            )

            assert result.exit_code == 0, result.output
            assert "✓ Wrote 10 record(s) to qdce.csv" in result.output
            rows = _rows("qdce.csv")
            assert len(rows) == 10
            for row in rows:
                expected = 0.5 if float(row["alpha"]) == 0.0 else math.cos(float(row["phi"]) / 2) ** 2
                assert float(row["e0"]) == pytest.approx(expected, abs=1e-11)
            assert os.path.exists("qdce.svg")
            assert os.path.exists("surface.svg")
            with open("qdce.csv.manifest.json", encoding="utf-8") as f:
                manifest = json.load(f)
            assert manifest["command"] == "qdce"
            assert manifest["outputs"] == ["qdce.csv", "qdce.svg", "surface.svg"]

    def test_manifest_config_reproduces_csv(self):
        """Feeding the manifest's config block back to `run` gives identical bytes."""
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli,
                ["ea-qdce", "--alpha-steps", "3", "--phi-steps", "5", "--mode", "sampled", "--shots", "300", "--seed", "8", "--out", "first.csv"],
            )
            assert result.exit_code == 0, result.output
            with open("first.csv.manifest.json", encoding="utf-8") as f:
                config = json.load(f)["config"]
            with open("replay.json", "w", encoding="utf-8") as f:
                json.dump(config, f)

            replay = self.runner.invoke(cli, ["run", "replay.json", "--out", "second.csv"])

            assert replay.exit_code == 0, replay.output
            with open("first.csv", "rb") as a, open("second.csv", "rb") as b:
                assert a.read() == b.read()

    def test_qdce_degrees(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["qdce", "--alpha", "90", "--degrees", "--phi-steps", "3", "--out", "deg.csv"]
            )

            assert result.exit_code == 0, result.output
            rows = _rows("deg.csv")
            assert len(rows) == 3
            assert all(float(r["alpha"]) == pytest.approx(math.pi / 2) for r in rows)

    def test_qdce_sampled(self):
        with self.runner.isolated_filesystem():
            args = ["qdce", "--alpha-steps", "2", "--phi-steps", "3", "--mode", "sampled", "--shots", "500"]
            first = self.runner.invoke(cli, args + ["--out", "a.csv", "--seed", "5"])
            second = self.runner.invoke(cli, args + ["--out", "b.csv", "--seed", "5", "--workers", "2"])

            assert first.exit_code == 0 and second.exit_code == 0
            with open("a.csv", "rb") as a, open("b.csv", "rb") as b:
                assert a.read() == b.read()
            assert all(r["shots"] == "1500" for r in _rows("a.csv"))

    def test_ea_qdce_branch(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["ea-qdce", "--alpha", "0", "--phi-steps", "5", "--branch", "1", "--out", "ea.csv", "--svg", "ea.svg"]
            )

            assert result.exit_code == 0, result.output
            rows = _rows("ea.csv")
            assert {r["branch"] for r in rows} == {"1"}
            for row in rows:
                assert float(row["e0"]) == pytest.approx(math.cos(float(row["phi"]) / 2) ** 2, abs=1e-10)
                assert float(row["branch_prob"]) == pytest.approx(0.5)

    def test_ea_qdce_both_branches(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["ea-qdce", "--alpha-steps", "2", "--phi-steps", "3", "--out", "ea.csv"])

            assert result.exit_code == 0, result.output
            assert len(_rows("ea.csv")) == 12

    def test_qdce_with_noise_file(self):
        noise_file = os.path.join(self.fixtures_dir, "zero_noise_config.json")
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["qdce", "--alpha", HALF_PI, "--phi-steps", "3", "--noise", noise_file, "--out", "n.csv"]
            )

            assert result.exit_code == 0, result.output
            assert float(_rows("n.csv")[0]["e0"]) == pytest.approx(1.0, abs=1e-12)

    def test_run_config_file(self):
        config_file = os.path.join(self.fixtures_dir, "valid_config.json")
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["run", config_file, "--out", "run.csv"])

            assert result.exit_code == 0, result.output
            assert len(_rows("run.csv")) == 10
            with open("run.csv.manifest.json", encoding="utf-8") as f:
                assert json.load(f)["config"]["scheme"] == "QDCE"

    def test_run_sampled_yaml(self):
        config_file = os.path.join(self.fixtures_dir, "sampled_config.yaml")
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["run", config_file, "--out", "run.csv"])

            assert result.exit_code == 0, result.output
            rows = _rows("run.csv")
            assert len(rows) == 10
            assert {r["mode"] for r in rows} == {"sampled"}

    def test_run_invalid_config(self):
        config_file = os.path.join(self.fixtures_dir, "invalid_config.json")
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["run", config_file, "--out", "run.csv"])

            assert result.exit_code == 1
            assert "Error:" in result.output
            assert "scheme" in result.output

    def test_run_malformed_config_verbose(self):
        with self.runner.isolated_filesystem():
            with open("broken.json", "w", encoding="utf-8") as f:
                f.write('{"scheme": "QDCE",\n  "phi_steps": [\n')
            result = self.runner.invoke(cli, ["-v", "run", "broken.json", "--out", "run.csv"])

            assert result.exit_code == 1
            assert "Error: Failed to parse config at line" in result.output
            assert "Details:" in result.output


class TestAnalysisCommands:
    """Test cases for visibility, compare-hv and hv-mc."""

    def setup_method(self):
        self.runner = CliRunner()

    def test_visibility_follows_sin_squared(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["visibility", "--alpha-steps", "5", "--phi-steps", "64", "--out", "vis.csv", "--svg", "vis.svg"]
            )

            assert result.exit_code == 0, result.output
            rows = _rows("vis.csv")
            assert len(rows) == 5
            for row in rows:
                alpha = float(row["alpha"])
                assert float(row["visibility"]) == pytest.approx(math.sin(alpha) ** 2, abs=1e-9)
                assert float(row["theory"]) == pytest.approx(math.sin(alpha) ** 2, abs=1e-11)
            assert os.path.exists("vis.svg")

    def test_visibility_entangled_branches(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["visibility", "--scheme", "EA-QDCE", "--alpha", "0", "--phi-steps", "16", "--out", "vis.csv"]
            )

            assert result.exit_code == 0, result.output
            by_branch = {r["branch"]: float(r["visibility"]) for r in _rows("vis.csv")}
            assert by_branch["0"] == pytest.approx(0.0, abs=1e-9)
            assert by_branch["1"] == pytest.approx(1.0, abs=1e-9)

    def test_compare_hv(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["compare-hv", "--alpha", "0", "--alpha", HALF_PI, "--out", "cmp.csv", "--svg", "cmp.svg"]
            )

            assert result.exit_code == 0, result.output
            assert "max |QM - HV| = 0.25" in result.output
            rows = _rows("cmp.csv")
            assert len(rows) == 42
            hv_by_alpha = {}
            for row in rows:
                hv_by_alpha.setdefault(row["alpha"], []).append(row["hv_e0"])
            first, second = hv_by_alpha.values()
            assert first == second
            with open("cmp.csv.report.md", encoding="utf-8") as f:
                report = f.read()
            assert "AS PRINTED" in report
            assert "DISCREPANCY" in report
            with open("cmp.csv.manifest.json", encoding="utf-8") as f:
                assert json.load(f)["parameters"]["branch"] == 0

    def test_compare_hv_custom_report(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["compare-hv", "--alpha-steps", "2", "--phi-steps", "5", "--out", "c.csv", "--report", "r.md"]
            )

            assert result.exit_code == 0, result.output
            assert os.path.exists("r.md")

    def test_hv_mc(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["hv-mc", "--phi", "0", "--phi", "180", "--degrees", "--samples", "20000", "--seed", "1", "--out", "mc.csv"]
            )

            assert result.exit_code == 0, result.output
            rows = _rows("mc.csv")
            assert [float(r["hv_theory"]) for r in rows] == [0.75, 0.25]
            for row in rows:
                assert abs(float(row["hv_mc"]) - float(row["hv_theory"])) <= 5 * float(row["stderr"])

    def test_hv_mc_default_grid(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["hv-mc", "--samples", "100", "--out", "mc.csv", "--svg", "mc.svg"])

            assert result.exit_code == 0, result.output
            assert len(_rows("mc.csv")) == 8


class TestErrorHandling:
    """Test cases for exit codes and error messages."""

    def setup_method(self):
        self.runner = CliRunner()

    def test_unknown_flag(self):
        result = self.runner.invoke(cli, ["qdce", "--bogus", "--out", "x.csv"])

        assert result.exit_code == 2

    def test_missing_out(self):
        result = self.runner.invoke(cli, ["qdce"])

        assert result.exit_code == 2

    def test_zero_phi_steps(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["qdce", "--phi-steps", "0", "--out", "x.csv"])

            assert result.exit_code == 1
            assert "Error:" in result.output
            assert not os.path.exists("x.csv")

    def test_alpha_and_alpha_steps(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["qdce", "--alpha", "0", "--alpha-steps", "3", "--out", "x.csv"])

            assert result.exit_code == 1
            assert "mutually exclusive" in result.output

    def test_sampled_without_shots(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli, ["qdce", "--mode", "sampled", "--shots", "0", "--out", "x.csv"]
            )

            assert result.exit_code == 1
            assert "shots" in result.output

    def test_negative_seed(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(cli, ["hv-mc", "--seed=-1", "--out", "x.csv"])

            assert result.exit_code == 1
            assert "seed" in result.output


class TestMain:
    """Test cases for the main() entry point."""

    def test_success_returns_zero(self):
        assert main(["gates"]) == 0

    def test_usage_error_returns_two(self):
        assert main(["qdce", "--bogus"]) == 2

    def test_domain_error_returns_one(self, tmp_path):
        assert main(["qdce", "--phi-steps", "0", "--out", str(tmp_path / "x.csv")]) == 1

    def test_sweep_returns_zero(self, tmp_path):
        out = str(tmp_path / "ok.csv")
        assert main(["qdce", "--alpha", "0", "--phi-steps", "3", "--out", out]) == 0
        assert os.path.exists(out)
