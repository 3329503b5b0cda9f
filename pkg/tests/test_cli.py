import json
import sys

import pytest

from causalcast.cli import build_parser, main
from causalcast.graphs import read_truth_csv
from causalcast.series import read_panel_csv

MOCK_BRIDGE = f"{sys.executable} -m causalcast.forecast.mock_bridge"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    if code == 0:
        return code, json.loads(captured.out.strip()), captured.err
    return code, None, captured.err


def test_gen_logistic(tmp_path, capsys):
    code, result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "0"
    )
    assert code == 0
    panel = read_panel_csv(result["panel"])
    assert panel.names == ("x1", "x2", "x3")
    assert panel.n_points == 100
    truth = read_truth_csv(result["truth"], ("x1", "x2", "x3"))
    assert {(e.source, e.target) for e in truth.edges} == {
        ("x1", "x2"),
        ("x2", "x3"),
    }


def test_gen_mou(tmp_path, capsys):
    code, result, _ = run_cli(
        capsys,
        "gen",
        "mou",
        "--output-dir",
        str(tmp_path),
        "--n-nodes",
        "5",
        "--density",
        "0.4",
        "--seed",
        "3",
    )
    assert code == 0
    panel = read_panel_csv(result["panel"])
    assert panel.n_series == 5
    nodes = tuple(f"x{i}" for i in range(1, 6))
    assert len(read_truth_csv(result["truth"], nodes).edges) > 0


def test_causality_granger_on_generated_panel(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "0"
    )
    code, result, _ = run_cli(
        capsys,
        "causality",
        "--panel",
        gen_result["panel"],
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    assert result["nodes"] == 3
    assert result["significant"] >= 2
    assert (tmp_path / "edges.csv").exists()


def test_causality_residual_method(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "1"
    )
    code, result, _ = run_cli(
        capsys,
        "causality",
        "--panel",
        gen_result["panel"],
        "--method",
        "residual",
        "--forecaster",
        "naive_mean",
        "--bh",
        "panel",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    assert result["nodes"] == 3


def test_forecast_subset_on_panel(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "2"
    )
    code, result, _ = run_cli(
        capsys,
        "forecast",
        "--panel",
        gen_result["panel"],
        "--forecasters",
        "naive_mean,naive_last",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    with open(result["summary"], "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["experiment"] == "forecast_benchmark"
    assert set(summary["aggregates"]["by_forecaster"]) == {
        "naive_mean",
        "naive_last",
    }


def test_forecast_bridge_cmd_appends_external(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "2"
    )
    code, result, _ = run_cli(
        capsys,
        "forecast",
        "--panel",
        gen_result["panel"],
        "--forecasters",
        "naive_last",
        "--bridge-cmd",
        MOCK_BRIDGE,
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    with open(result["summary"], "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    by_forecaster = summary["aggregates"]["by_forecaster"]
    assert set(by_forecaster) == {"naive_last", "external"}
    # The mock echoes the last value, so both rows score identically.
    assert by_forecaster["external"]["mape"]["mean"] == pytest.approx(
        by_forecaster["naive_last"]["mape"]["mean"]
    )


def test_experiment_logistic_then_report(tmp_path, capsys):
    code, result, _ = run_cli(
        capsys,
        "experiment",
        "logistic",
        "--trials",
        "1",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    assert result["rows"].endswith("logistic_rows.csv")
    code, rep, _ = run_cli(
        capsys,
        "report",
        "--rows",
        result["rows"],
        "--by",
        "method,alpha",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 0
    assert rep["groups"] == 9
    with open(rep["summary"], "r", encoding="utf-8") as fh:
        summary = json.load(fh)
    assert all("|" in key for key in summary)
    assert all("accuracy" in entry for entry in summary.values())


def test_config_file_supplies_defaults_and_flags_win(tmp_path, capsys):
    config_dir = tmp_path / "from_config"
    flag_dir = tmp_path / "from_flag"
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"output_dir": str(config_dir), "seed": 5}))
    code, _, _ = run_cli(
        capsys, "gen", "logistic", "--config", str(config)
    )
    assert code == 0
    assert (config_dir / "logistic_panel.csv").exists()
    code, _, _ = run_cli(
        capsys,
        "gen",
        "logistic",
        "--config",
        str(config),
        "--output-dir",
        str(flag_dir),
    )
    assert code == 0
    assert (flag_dir / "logistic_panel.csv").exists()


def test_config_file_must_hold_object(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text("[1, 2]")
    code, _, err = run_cli(
        capsys, "gen", "logistic", "--config", str(config)
    )
    assert code == 1
    assert "JSON object" in json.loads(err.strip())["error"]


def test_error_goes_to_stderr_as_json(tmp_path, capsys):
    code, _, err = run_cli(
        capsys,
        "causality",
        "--panel",
        str(tmp_path / "missing.csv"),
    )
    assert code == 1
    payload = json.loads(err.strip())
    assert "error" in payload
    assert "missing.csv" in payload["error"]


def test_unknown_forecaster_rejected(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "0"
    )
    code, _, err = run_cli(
        capsys,
        "causality",
        "--panel",
        gen_result["panel"],
        "--method",
        "residual",
        "--forecaster",
        "prophet",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 1
    assert "unknown forecaster" in json.loads(err.strip())["error"]


def test_external_forecaster_requires_bridge_cmd(tmp_path, capsys):
    _, gen_result, _ = run_cli(
        capsys, "gen", "logistic", "--output-dir", str(tmp_path), "--seed", "0"
    )
    code, _, err = run_cli(
        capsys,
        "causality",
        "--panel",
        gen_result["panel"],
        "--method",
        "residual",
        "--forecaster",
        "external",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 1
    assert "bridge-cmd" in json.loads(err.strip())["error"]


def test_invalid_spec_value_fails_cleanly(tmp_path, capsys):
    code, _, err = run_cli(
        capsys,
        "gen",
        "mou",
        "--sigma2",
        "0",
        "--output-dir",
        str(tmp_path),
    )
    assert code == 1
    assert "noise variance" in json.loads(err.strip())["error"]


def test_parser_rejects_missing_subcommand(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    assert "required: command" in capsys.readouterr().err


def test_parser_rejects_unknown_family(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["gen", "fractal"])
    assert "invalid choice" in capsys.readouterr().err
