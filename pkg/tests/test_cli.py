"""Tests for the command line."""

import json

import pytest

from qineq import cli
from qineq.errors import SpectralComputationError
from qineq.models import ChainReport, RunSummary

VERIFY_MONDLOG = [
    "verify", "--theorem", "mondlog", "--dim", "4", "--trials", "20",
    "--seed", "42", "--spectrum", "1,4", "--function", "power:r=-1",
]


def _write_matrix(tmp_path, entries, name="matrix.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"n": len(entries), "entries": entries}), encoding="utf-8")
    return str(path)


def test_verify_passes_and_is_reproducible(capsys):
    assert cli.main(VERIFY_MONDLOG) == cli.EXIT_PASS
    first = capsys.readouterr().out
    assert cli.main(VERIFY_MONDLOG) == cli.EXIT_PASS
    assert capsys.readouterr().out == first

    lines = first.splitlines()
    assert len(lines) == 21
    report = json.loads(lines[0])
    assert report["theorem"] == "mondlog" and report["pass"] is True
    assert len(report["terms"]) == 3
    assert report["witness"]["trial"] == 0
    summary = json.loads(lines[-1])["summary"]
    assert summary["trials"] == 20 and summary["violation_count"] == 0


def test_verify_text_format(capsys):
    assert cli.main(VERIFY_MONDLOG + ["--trials", "2", "--format", "text"]) == cli.EXIT_PASS
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("PASS mondlog trial=0")
    assert lines[-1].startswith("mondlog: 2 pass, 0 violations")


def test_verify_writes_output_file(tmp_path, capsys):
    target = tmp_path / "reports.jsonl"
    assert cli.main(VERIFY_MONDLOG + ["--trials", "3", "--output", str(target)]) == cli.EXIT_PASS
    assert capsys.readouterr().out == ""
    assert len(target.read_text(encoding="utf-8").splitlines()) == 4


def test_violation_exit_code(monkeypatch, capsys):
    failing = ChainReport.evaluate("mondlog", [("a", 2.0), ("b", 1.0)], tol=1e-9)
    summary = RunSummary.from_reports("mondlog", 1, [failing])
    monkeypatch.setattr(cli, "run_campaign", lambda config: ([failing], summary))
    assert cli.main(VERIFY_MONDLOG) == cli.EXIT_VIOLATION
    assert '"pass":false' in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--theorem", "kyfan-operator", "--spectrum", "0.2,0.6", "--trials", "5"],
        ["verify", "--theorem", "holder-mccarthy", "--spectrum", "2,2", "--trials", "5"],
        ["verify", "--theorem", "no-such-theorem"],
        ["verify", "--theorem", "mondlog", "--function", "power:r=2", "--trials", "5"],
        ["verify", "--theorem", "mondlog", "--spectrum", "1;4"],
        ["verify", "--theorem", "mondlog", "--trials", "0"],
        ["search", "--theorem", "mondlog", "--budget", "-1"],
        ["bogus"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_help_exits_cleanly(capsys):
    assert cli.main(["--help"]) == cli.EXIT_PASS
    assert "verify" in capsys.readouterr().out


def test_search_command(capsys):
    argv = ["search", "--theorem", "mondlog", "--dim", "2", "--spectrum", "1,4", "--function", "exp", "--budget", "5"]
    assert cli.main(argv) == cli.EXIT_PASS
    result = json.loads(capsys.readouterr().out)
    assert result["theorem"] == "mondlog"
    assert result["suspected_violation"] is False
    assert result["worst"]["pass"] is True


def test_spectrum_command(tmp_path, capsys):
    path = _write_matrix(tmp_path, [[[1, 0, 0, 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [4, 0, 0, 0]]])
    assert cli.main(["spectrum", path]) == cli.EXIT_PASS
    payload = json.loads(capsys.readouterr().out)
    assert [s["re"] for s in payload["spheres"]] == [pytest.approx(1.0), pytest.approx(4.0)]
    assert payload["spectral_radius"] == pytest.approx(4.0)
    assert payload["m_T"] == pytest.approx(1.0) and payload["M_T"] == pytest.approx(4.0)


def test_spectrum_of_non_selfadjoint_has_no_bounds(tmp_path, capsys):
    path = _write_matrix(tmp_path, [[[0, 0, 1, 0]]])
    assert cli.main(["spectrum", path]) == cli.EXIT_PASS
    payload = json.loads(capsys.readouterr().out)
    assert payload["spheres"][0]["im"] == pytest.approx(1.0)
    assert "m_T" not in payload


def test_malformed_matrix_file(tmp_path):
    path = _write_matrix(tmp_path, [[[1, 0, 0]]])
    assert cli.main(["spectrum", path]) == cli.EXIT_USAGE
    assert cli.main(["spectrum", str(tmp_path / "missing.json")]) == cli.EXIT_USAGE


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def broken(T):
        raise SpectralComputationError("eigensolver did not converge")

    monkeypatch.setattr(cli, "spectrum", broken)
    assert cli.main(["spectrum", _write_matrix(tmp_path, [[[1, 0, 0, 0]]])]) == cli.EXIT_NUMERICAL


def test_resolvent_command(tmp_path, capsys):
    path = _write_matrix(tmp_path, [[[1, 0, 0, 0]]])
    assert cli.main(["resolvent", path, "--q", "3", "0", "0", "0"]) == cli.EXIT_PASS
    payload = json.loads(capsys.readouterr().out)
    assert payload["matrix"]["entries"][0][0][0] == pytest.approx(0.25, abs=1e-10)
    assert payload["residual"] <= 1e-10


def test_resolvent_outside_convergence_region(tmp_path, capsys):
    path = _write_matrix(tmp_path, [[[1, 0, 0, 0]]])
    assert cli.main(["resolvent", path, "--q", "0.5", "0", "0", "0"]) == cli.EXIT_USAGE
    assert "||T||" in capsys.readouterr().err


def test_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("QINEQ_TOL", "1e-6")
    parser = cli.build_parser(cli.Settings())
    args = parser.parse_args(["verify", "--theorem", "mondlog"])
    assert args.tol == 1e-6
