import json

import pytest
import yaml
from click.testing import CliRunner

from cli import cli
from tests.utils.surfaces import fixture_data


def _write(tmp_path, name, data):
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


class TestCheckCommand:
    @pytest.fixture
    def runner(self):
        return CliRunner()

    @pytest.fixture
    def plane_path(self, tmp_path):
        """Small null plane definition with a few quick checks"""
        data = fixture_data("null_plane")
        data["grid"] = {"n1": 2, "n2": 2}
        data["checks"] = {"run": ["frame", "identities", "planar_degenerate"]}
        return _write(tmp_path, "null_plane", data)

    def test_passing_run_writes_report(self, runner, plane_path, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(cli, ["check", str(plane_path), "--report", str(report_path)])
        assert result.exit_code == 0, result.output
        report = json.loads(report_path.read_text())
        assert report["name"] == "null_plane"
        assert report["exit_code"] == 0
        assert [c["status"] for c in report["checks"]] == ["pass", "pass", "pass"]
        assert len(report["points"]) == 4

    def test_failing_check_exits_two(self, runner, tmp_path):
        data = fixture_data("null_helicoid")
        data["grid"] = {"n1": 1, "n2": 3}
        data["checks"] = {"run": ["planar_nondegenerate"]}
        path = _write(tmp_path, "null_helicoid", data)
        result = runner.invoke(cli, ["check", str(path), "--report", str(tmp_path / "out.json")])
        assert result.exit_code == 2

    def test_single_point_with_backend_override(self, runner, plane_path, tmp_path):
        report_path = tmp_path / "point.json"
        result = runner.invoke(cli, [
            "check", str(plane_path), "--point", "0.1,-0.2", "--backend", "jet",
            "--tol", "1e-7", "--report", str(report_path),
        ])
        assert result.exit_code == 0, result.output
        report = json.loads(report_path.read_text())
        assert report["backend"] == "jet"
        assert report["tolerance"] == 1e-7
        assert report["points"][0]["point"] == [0.1, -0.2]
        assert "terms" in report["points"][0]["data"]

    @pytest.mark.parametrize("trace", ["v", "w=v"])
    def test_trace_accepts_both_spellings(self, runner, plane_path, tmp_path, trace):
        report_path = tmp_path / "trace.json"
        result = runner.invoke(cli, [
            "check", str(plane_path), "--point", "0.0,0.0", "--trace", trace, "--report", str(report_path),
        ])
        assert result.exit_code == 0, result.output
        traced = json.loads(report_path.read_text())["points"][0]["data"]["backend_trace"]
        assert "curve" in traced["nondegenerate"]
        assert "curve" not in traced["degenerate"]

    def test_point_outside_the_domain_exits_one(self, runner, plane_path, tmp_path):
        report_path = tmp_path / "outside.json"
        result = runner.invoke(cli, ["check", str(plane_path), "--point", "0.0,3.0", "--report", str(report_path)])
        assert result.exit_code == 1
        (point,) = json.loads(report_path.read_text())["points"]
        assert point["error"].startswith("OutsideDomain")

    @pytest.mark.parametrize("args", [
        ["--backend", "gpu"],
        ["--point", "0.1"],
        ["--tol", "-1"],
        ["--trace", "n"],
    ])
    def test_usage_errors_exit_one(self, runner, plane_path, args):
        result = runner.invoke(cli, ["check", str(plane_path), *args])
        assert result.exit_code == 1

    def test_missing_config_exits_one(self, runner, tmp_path):
        result = runner.invoke(cli, ["check", str(tmp_path / "absent.yaml")])
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_invalid_config_exits_one(self, runner, tmp_path):
        data = fixture_data("null_plane")
        data["ambient"] = {"signs": [1, 1, 1, 1]}
        result = runner.invoke(cli, ["check", str(_write(tmp_path, "bad", data))])
        assert result.exit_code == 1
        assert "ambient" in result.output
