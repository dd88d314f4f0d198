"""
Tests for the command-line application.
"""

import io

import orjson
import pandas as pd
import pytest
from typer.testing import CliRunner

from src import __version__
from src.cli import app
from src.services import registry
from src.services.reporting import validate_report


@pytest.fixture
def runner():
    return CliRunner()


class TestList:

    def test_json_listing(self, runner):
        result = runner.invoke(app, ["list", "--format", "json"])
        assert result.exit_code == 0
        entries = orjson.loads(result.stdout)
        assert [entry["id"] for entry in entries] == registry.ids()
        assert {"id", "anchor", "arity", "tolerance", "n_values"} == set(entries[0])

    def test_text_listing(self, runner):
        result = runner.invoke(app, ["list"])
        assert result.exit_code == 0
        assert "scalar_fay" in result.stderr
        assert result.stdout == ""

    def test_version(self, runner):
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.stdout


class TestCheck:

    def test_report_on_stdout(self, runner):
        result = runner.invoke(app, ["check", "--ids", "unitarity,fay_mat2", "--n", "2,3",
                                     "--seed", "7", "--count", "5", "--workers", "1"])
        assert result.exit_code == 0, result.output
        payload = orjson.loads(result.stdout)
        validate_report(payload)
        assert [check["id"] for check in payload["checks"]] == ["unitarity", "fay_mat2"]
        assert payload["config"]["n_list"] == [2, 3]
        assert payload["pass"] is True

    def test_report_file(self, runner, tmp_path):
        target = tmp_path / "report.json"
        result = runner.invoke(app, ["check", "--ids", "scalar_fay,kappa_sum", "--count", "3",
                                     "--workers", "1", "--output", str(target)])
        assert result.exit_code == 0, result.output
        payload = orjson.loads(target.read_bytes())
        validate_report(payload)
        assert len(payload["checks"]) == 2

    def test_unknown_id(self, runner):
        result = runner.invoke(app, ["check", "--ids", "nosuch"])
        assert result.exit_code == 2
        assert "nosuch" in result.output

    def test_tolerance_override(self, runner):
        result = runner.invoke(app, ["check", "--ids", "scalar_fay", "--count", "3", "--workers", "1",
                                     "--tolerance", "scalar_fay=1e-300"])
        assert result.exit_code == 1
        payload = orjson.loads(result.stdout)
        assert payload["config"]["tolerances"] == {"scalar_fay": 1e-300}
        assert payload["checks"][0]["pass"] is False

    @pytest.mark.parametrize("args", [
        ["--tolerance", "nosuch=1e-5"],
        ["--tolerance", "scalar_fay"],
        ["--n", "0"],
        ["--tau", "0.01j"],
        ["--pole-guard", "0.7"],
    ])
    def test_usage_errors(self, runner, args):
        result = runner.invoke(app, ["check", "--ids", "scalar_fay", *args])
        assert result.exit_code == 2

    def test_csv_format(self, runner):
        result = runner.invoke(app, ["check", "--ids", "scalar_fay", "--count", "3", "--workers", "1",
                                     "--format", "csv"])
        assert result.exit_code == 0
        assert result.stdout.startswith("id,samples_run,tolerance,max_residual,mean_residual,pass\r\n")


class TestTable:

    def test_single_point(self, runner):
        result = runner.invoke(app, ["table", "--z", "0.2", "--u", "0.3"])
        assert result.exit_code == 0
        frame = pd.read_csv(io.StringIO(result.stdout))
        assert len(frame) == 1
        assert frame.loc[0, "pole_flag"] == 0

    def test_grid_to_file(self, runner, tmp_path):
        target = tmp_path / "grid.csv"
        result = runner.invoke(app, ["table", "--grid", "4", "--output", str(target), "--gnuplot-hint"])
        assert result.exit_code == 0
        frame = pd.read_csv(target)
        assert len(frame) == 16
        assert frame["pole_flag"].sum() == 1
        assert "16 rows, 1 pole-flagged" in result.stderr
        assert "splot" in result.stderr


class TestPainleve:

    def test_free_motion(self, runner):
        result = runner.invoke(app, ["pvi", "--nu", "0,0,0,0"])
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(io.StringIO(result.stdout))
        assert frame["residual_h0"].max() == 0

    def test_even_n_reports_single_constant(self, runner):
        result = runner.invoke(app, ["pvi", "--n", "2", "--tau-end", "0.95j"])
        assert result.exit_code == 0, result.output
        assert "effective single constant" in result.stderr
        assert "0.3" in result.stderr

    def test_halt_emits_partial_trajectory(self, runner):
        result = runner.invoke(app, ["pvi", "--u0", "0"])
        assert result.exit_code == 3
        frame = pd.read_csv(io.StringIO(result.stdout))
        assert len(frame) == 1
        assert "pole_approach" in result.stderr

    @pytest.mark.parametrize("args", [
        ["--nu", "0.1,0.2"],
        ["--mode", "spectral"],
        ["--tau-end", "0.1j"],
    ])
    def test_usage_errors(self, runner, args):
        result = runner.invoke(app, ["pvi", *args])
        assert result.exit_code == 2
