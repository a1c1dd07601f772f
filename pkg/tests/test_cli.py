"""Command-line tests driven through typer's CliRunner."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from src.cli import app
from src.components.postselect_simulator import simulate
from src.components.setup_compiler import compile_setup
from src.components.spin_algebra import CoupledLabel, StateVector

SWITCH_LABEL = "1/2,1,1/2;1/2"


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def _compile_to(runner: CliRunner, label: str, path: Path) -> None:
    result = runner.invoke(app, ["compile", label, "-o", str(path)])
    assert result.exit_code == 0, result.output


def test_basis_lists_labels(runner):
    result = runner.invoke(app, ["basis", "2"])

    assert result.exit_code == 0
    assert result.stdout.splitlines() == ["1/2,0;0", "1/2,1;-1", "1/2,1;0", "1/2,1;1"]


def test_basis_json(runner):
    result = runner.invoke(app, ["basis", "3", "--json"])

    assert result.exit_code == 0
    assert len(json.loads(result.stdout)) == 8


def test_basis_rejects_bad_size(runner):
    assert runner.invoke(app, ["basis", "0"]).exit_code == 2


def test_verify_switch_label(runner):
    result = runner.invoke(app, ["verify", SWITCH_LABEL])

    assert result.exit_code == 0
    assert "exact_match: true" in result.stdout
    assert "(model convention)" in result.stdout


def test_verify_json(runner):
    result = runner.invoke(app, ["verify", "1/2,1,3/2;1/2", "--json"])

    payload = json.loads(result.stdout)
    assert result.exit_code == 0
    assert payload["exact_match"] is True
    assert payload["fidelity"] == pytest.approx(1.0)
    assert payload["success_probability"] == pytest.approx(1 / 18)


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "1/2,0;1"],
        ["verify", "nonsense"],
        ["verify", SWITCH_LABEL, "--efficiency", "2"],
        ["sweep", "0"],
        ["graph", "1/2,3/2;1/2"],
    ],
)
def test_invalid_input_exits_with_two(runner, args):
    assert runner.invoke(app, args).exit_code == 2


def test_sweep_three_qubits(runner, tmp_path):
    csv_path = tmp_path / "sweep.csv"

    result = runner.invoke(app, ["sweep", "3", "--csv", str(csv_path)])

    assert result.exit_code == 0
    rows = [line for line in result.stdout.splitlines() if line.startswith("1/2")]
    assert len(rows) == 8
    assert "8/8 exact" in result.stdout
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "history,two_m,fidelity,success_prob,exact,null"
    assert len(lines) == 9
    assert all(line.endswith(",true,false") for line in lines[1:])


def test_sweep_csv_to_stdout_from_environment(runner, monkeypatch):
    monkeypatch.setenv("COUPLING_OUTPUT_FORMAT", "csv")

    result = runner.invoke(app, ["sweep", "2"])

    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "history,two_m,fidelity,success_prob,exact,null"


def test_sweep_json_summary(runner):
    result = runner.invoke(app, ["sweep", "2", "--json"])

    payload = json.loads(result.stdout)
    assert payload["summary"]["all_exact"] is True
    assert len(payload["reports"]) == 4


def test_sweep_unwritable_csv_exits_with_three(runner, tmp_path):
    result = runner.invoke(app, ["sweep", "1", "--csv", str(tmp_path / "missing" / "out.csv")])

    assert result.exit_code == 3


def test_compile_then_simulate_round_trip(runner, tmp_path):
    path = tmp_path / "switch.json"
    _compile_to(runner, SWITCH_LABEL, path)

    result = runner.invoke(app, ["simulate", str(path), "--json"])

    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert [(item["bits"], item["re"], item["im"]) for item in payload["projection"]] == [
        ("++-", 2, 0),
        ("+-+", -1, 0),
        ("-++", -1, 0),
    ]
    state = StateVector.from_text(3, "\n".join(payload["state"]))
    expected = simulate(compile_setup(CoupledLabel.parse(SWITCH_LABEL))[0]).state
    assert np.allclose(state.amplitudes, expected.amplitudes, atol=1e-12)
    assert payload["success_probability"] == pytest.approx(1 / 24)


def test_simulate_text_output(runner, tmp_path):
    path = tmp_path / "singlet.json"
    _compile_to(runner, "1/2,0;0", path)

    result = runner.invoke(app, ["simulate", str(path)])

    assert result.exit_code == 0
    assert "+- 1 0\n-+ -1 0" in result.stdout
    assert "# success probability (model convention)\n0.125" in result.stdout


def test_compile_prints_setup_and_trace(runner):
    result = runner.invoke(app, ["compile", "1/2,0;0", "--trace"])

    payload = json.loads(result.stdout)
    assert result.exit_code == 0
    assert payload["setup"]["n"] == 2
    assert payload["trace"]["records"][1]["step"] == "DOWN"


def test_simulate_missing_file_exits_with_three(runner, tmp_path):
    assert runner.invoke(app, ["simulate", str(tmp_path / "absent.json")]).exit_code == 3


def test_simulate_malformed_file_exits_with_two(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 2, "polarizers": ["s-"]}', encoding="utf-8")

    assert runner.invoke(app, ["simulate", str(path)]).exit_code == 2


def test_graph_from_label_and_file(runner, tmp_path):
    path = tmp_path / "singlet.json"
    _compile_to(runner, "1/2,0;0", path)

    from_label = runner.invoke(app, ["graph", "1/2,0;0"])
    from_file = runner.invoke(app, ["graph", str(path)])

    assert from_label.exit_code == 0
    assert from_label.stdout == from_file.stdout
    assert 'e2 -- d1 [style=dashed, label="π"];' in from_label.stdout


def test_oracle_command(runner, tmp_path):
    path = tmp_path / "switch.json"
    _compile_to(runner, SWITCH_LABEL, path)

    result = runner.invoke(app, ["oracle", str(path), "--json"])

    payload = json.loads(result.stdout)
    assert result.exit_code == 0
    assert payload["oracle_probability"] == pytest.approx(payload["model_probability"], rel=1e-9)
    assert payload["state_fidelity"] == pytest.approx(1.0, abs=1e-10)


def test_output_is_deterministic(runner):
    first = runner.invoke(app, ["sweep", "3", "--json"])
    second = runner.invoke(app, ["sweep", "3", "--json"])

    assert first.stdout == second.stdout


@pytest.mark.parametrize("command", ["simulate", "oracle", "graph"])
def test_undecodable_setup_file_exits_with_two(runner, tmp_path, command):
    path = tmp_path / "bad.json"
    path.write_bytes(b'{"n": 1, "polarizers": ["\xff"], "fibers": []}')

    result = runner.invoke(app, [command, str(path)])

    assert result.exit_code == 2
    assert "byte 25" in result.output


def test_graph_missing_file_exits_with_three(runner, tmp_path):
    assert runner.invoke(app, ["graph", str(tmp_path / "absent.json")]).exit_code == 3


def test_graph_rejects_invalid_setup(runner, tmp_path):
    path = tmp_path / "isolated.json"
    path.write_text(
        '{"n": 2, "polarizers": ["σ-", "σ+"], "fibers": [{"emitter": 1, "detector": 1, "phase_over_pi": "0"}]}',
        encoding="utf-8",
    )

    result = runner.invoke(app, ["graph", str(path)])

    assert result.exit_code == 2
    assert "Emitter 2 has no fibers" in result.output


def test_compile_to_file_prints_trace(runner, tmp_path):
    path = tmp_path / "singlet.json"

    result = runner.invoke(app, ["compile", "1/2,0;0", "-o", str(path), "--trace"])

    assert result.exit_code == 0
    assert json.loads(result.stdout)["records"][1]["reserved"] == [1, 2]
    assert path.is_file()
