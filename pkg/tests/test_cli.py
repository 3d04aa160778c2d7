"""Unit tests for the command line front end (run in process)."""

import json

import pytest

import helpers
from qgi.cli import main
from qgi.scene import serialize_scene


def run(argv, capsys):
    """Invoke the CLI and normalize SystemExit into a return code."""
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def hopf_path(tmp_path):
    path = tmp_path / "hopf.json"
    path.write_text(serialize_scene(helpers.hopf_scene()))
    return str(path)


@pytest.fixture()
def aligned_path(tmp_path):
    path = tmp_path / "aligned.json"
    path.write_text(serialize_scene(helpers.hopf_scene(seed=None)))
    return str(path)


class TestValidate:
    def test_ok(self, hopf_path, capsys):
        code, out, _ = run(["validate", hopf_path], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["ok"] is True

    def test_violations_exit_1(self, aligned_path, capsys):
        code, out, _ = run(["validate", aligned_path], capsys)
        assert code == 1
        assert json.loads(out)["ok"] is False

    def test_missing_file_exit_3(self, tmp_path, capsys):
        code, out, err = run(["validate", str(tmp_path / "nope.json")], capsys)
        assert code == 3
        assert out == ""
        assert err.startswith("error:")

    def test_garbage_file_exit_3(self, tmp_path, capsys):
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        code, _, err = run(["validate", str(path)], capsys)
        assert code == 3
        assert "error:" in err

    def test_wrong_shape_exit_3(self, tmp_path, capsys):
        path = tmp_path / "shape.json"
        path.write_text('{"geometric_hyperlink": [{"id": "g"}]}')
        code, _, err = run(["validate", str(path)], capsys)
        assert code == 3


class TestInvariants:
    def test_report_and_exit_0(self, hopf_path, capsys):
        code, out, _ = run(["invariants", hopf_path], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["sk"] == -6

    def test_axis_restriction(self, hopf_path, capsys):
        code, out, _ = run(["invariants", hopf_path, "--axis", "2"], capsys)
        assert code == 0

    def test_invalid_scene_exit_1(self, aligned_path, capsys):
        code, out, _ = run(["invariants", aligned_path], capsys)
        assert code == 1
        assert "sk" not in json.loads(out)

    def test_pregeneric_recovers(self, aligned_path, capsys):
        code, out, _ = run(
            ["invariants", aligned_path, "--pregeneric", "99"], capsys
        )
        assert code == 0
        assert abs(json.loads(out)["sk"]) == 6

    def test_deterministic_stdout(self, hopf_path, capsys):
        _, first, _ = run(["invariants", hopf_path], capsys)
        _, second, _ = run(["invariants", hopf_path], capsys)
        assert first == second

    def test_tolerance_env_override(self, hopf_path, capsys, monkeypatch):
        monkeypatch.setenv("QGI_TOLERANCE", "1e-8")
        code, out, _ = run(["invariants", hopf_path], capsys)
        assert code == 0
        assert json.loads(out)["sk"] == -6

    def test_bad_tolerance_env_exit_3(self, hopf_path, capsys, monkeypatch):
        monkeypatch.setenv("QGI_TOLERANCE", "abc")
        code, _, err = run(["invariants", hopf_path], capsys)
        assert code == 3
        assert "QGI_TOLERANCE" in err

    def test_non_positive_tolerance_exit_3(self, hopf_path, capsys, monkeypatch):
        monkeypatch.setenv("QGI_TOLERANCE", "-1")
        code, _, _ = run(["invariants", hopf_path], capsys)
        assert code == 3


class TestFuzz:
    def test_summary_exit_0(self, hopf_path, capsys):
        code, out, _ = run(
            ["fuzz", hopf_path, "--steps", "8", "--seed", "7"], capsys
        )
        assert code == 0
        assert json.loads(out)["summary"]["invariants"]["sk"] == -6

    def test_deterministic_stdout(self, hopf_path, capsys):
        argv = ["fuzz", hopf_path, "--steps", "8", "--seed", "7"]
        _, first, _ = run(argv, capsys)
        _, second, _ = run(argv, capsys)
        assert first == second

    def test_invalid_scene_exit_1(self, aligned_path, capsys):
        code, out, _ = run(
            ["fuzz", aligned_path, "--steps", "5", "--seed", "1"], capsys
        )
        assert code == 1
        assert json.loads(out)["validation"]["ok"] is False

    def test_move_list(self, hopf_path, capsys):
        code, out, _ = run(
            [
                "fuzz", hopf_path, "--steps", "5", "--seed", "3",
                "--moves", "EdgeSubdivide,VertexJitter",
            ],
            capsys,
        )
        assert code == 0

    def test_unknown_move_exit_3(self, hopf_path, capsys):
        code, _, err = run(
            ["fuzz", hopf_path, "--steps", "5", "--seed", "3", "--moves", "Bogus"],
            capsys,
        )
        assert code == 3
        assert "schema" in err

    def test_broken_invariance_exit_4(self, hopf_path, capsys, monkeypatch):
        import qgi.cli as cli_module

        body = {"broken": {"move": None, "violations": []}, "provenance": {}}
        monkeypatch.setattr(cli_module, "_post", lambda args, path, payload: (200, body))
        code, out, _ = run(
            ["fuzz", hopf_path, "--steps", "5", "--seed", "3"], capsys
        )
        assert code == 4
        assert json.loads(out) == body

    def test_missing_steps_is_usage_error(self, hopf_path, capsys):
        code, _, err = run(["fuzz", hopf_path, "--seed", "7"], capsys)
        assert code == 2
        assert "--steps" in err


class TestDiagram:
    def test_writes_svg(self, hopf_path, tmp_path, capsys):
        out_path = tmp_path / "d.svg"
        code, out, _ = run(
            ["diagram", hopf_path, "--plane", "1", "--out", str(out_path)], capsys
        )
        assert code == 0
        assert json.loads(out) == {"out": str(out_path), "plane": 1}
        assert out_path.read_text().startswith("<svg")

    def test_degenerate_exit_2_no_file(self, aligned_path, tmp_path, capsys):
        out_path = tmp_path / "d.svg"
        code, out, err = run(
            ["diagram", aligned_path, "--plane", "1", "--out", str(out_path)], capsys
        )
        assert code == 2
        assert out == ""
        assert "degenerate" in err
        assert not out_path.exists()


class TestParser:
    def test_version(self, capsys):
        code, out, _ = run(["--version"], capsys)
        assert code == 0
        assert out.startswith("qgi ")

    def test_no_command_is_usage_error(self, capsys):
        code, _, _ = run([], capsys)
        assert code == 2

    def test_transport_failure_exit_70(self, hopf_path, capsys):
        code, _, err = run(
            ["validate", hopf_path, "--server", "http://127.0.0.1:1"], capsys
        )
        assert code == 70
        assert "service request failed" in err
