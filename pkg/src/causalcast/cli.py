"""Command-line entry point.

Subcommands: ``gen`` (synthetic panel + truth sidecar), ``forecast``
(panel benchmark), ``causality`` (single-panel graph inference),
``experiment logistic|mou`` (full sweeps), ``report`` (re-aggregate a
rows CSV).  Global flags accepted by every subcommand:

  --seed          master seed (default 0)
  --output-dir    where files are written (default .)
  --config FILE   JSON file of flag defaults (explicit flags win)
  --jobs N        parallel trial workers for experiments
  --bridge-cmd S  external forecaster launch command (shell-split)

On success the process prints one JSON line describing the outputs and
exits 0; on failure it prints {"error": ...} to stderr and exits 1.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from .causality import CausalityConfig, infer_graph, write_edge_tests_csv
from .evalharness import (
    BenchmarkConfig,
    LogisticExperimentConfig,
    MouExperimentConfig,
    emit_density_plot,
    make_benchmark_panel,
    read_rows_csv,
    run_forecast_benchmark,
    run_logistic_experiment,
    run_mou_experiment,
    summarize,
    write_report,
)
from .forecast import ForecasterSpec
from .graphs import write_truth_csv
from .series import read_panel_csv, write_panel_csv
from .synthgen import LogisticSpec, MouSpec, gen_logistic, gen_mou


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    parser.add_argument("--output-dir", default=None, help="output directory (default .)")
    parser.add_argument("--config", default=None, help="JSON file with flag defaults")
    parser.add_argument("--jobs", type=int, default=None, help="parallel workers (default 1)")
    parser.add_argument(
        "--bridge-cmd",
        default=None,
        help="launch command for an external forecaster, e.g. "
        "'python -m causalcast.forecast.mock_bridge'",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalcast",
        description="Forecasting baselines and residual-based causal discovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic panel with its truth graph")
    _add_common(gen)
    gen.add_argument("family", choices=("logistic", "mou"))
    gen.add_argument("--alpha", type=float, default=None, help="logistic coupling (default 0.5)")
    gen.add_argument("--r", type=float, default=None, help="logistic growth (default 3.8)")
    gen.add_argument("--n-points", type=int, default=None, help="series length (default 100)")
    gen.add_argument("--density", type=float, default=None, help="MOU density (default 0.5)")
    gen.add_argument("--n-nodes", type=int, default=None, help="MOU nodes (default 10)")
    gen.add_argument("--sigma2", type=float, default=None, help="MOU noise variance (default 0.2)")

    fc = sub.add_parser("forecast", help="benchmark forecasters on a panel CSV")
    _add_common(fc)
    fc.add_argument("--panel", default=None, help="panel CSV (default: bundled synthetic panel)")
    fc.add_argument(
        "--forecasters",
        default=None,
        help="comma-separated kinds (default naive_mean,naive_last,linreg,arima,ets)",
    )
    fc.add_argument("--train-fraction", type=float, default=None)

    ca = sub.add_parser("causality", help="infer a causal graph from a panel CSV")
    _add_common(ca)
    ca.add_argument("--panel", required=True, help="panel CSV")
    ca.add_argument("--method", choices=("granger", "residual"), default=None)
    ca.add_argument(
        "--forecaster",
        default=None,
        help="residual method forecaster kind (default arima; 'external' uses --bridge-cmd)",
    )
    ca.add_argument("--alpha", type=float, default=None, help="significance level (default 0.05)")
    ca.add_argument("--max-lag", type=int, default=None, help="largest tested lag (default 5)")
    ca.add_argument("--context", type=int, default=None, help="rolling context length (default 30)")
    ca.add_argument("--bh", choices=("pair", "panel"), default=None, help="BH family scope")

    ex = sub.add_parser("experiment", help="run a full sweep")
    _add_common(ex)
    ex.add_argument("sweep", choices=("logistic", "mou"))
    ex.add_argument("--methods", default=None, help="comma-separated methods")
    ex.add_argument("--trials", type=int, default=None, help="trials per grid point (default 10)")
    ex.add_argument("--n-points", type=int, default=None, help="series length (default 100)")
    ex.add_argument("--r", type=float, default=None, help="logistic growth rate (default 3.8)")
    ex.add_argument("--forecaster", default=None, help="residual method forecaster kind")
    ex.add_argument("--plot", action="store_true", default=None, help="emit a curves plot (mou)")

    rp = sub.add_parser("report", help="re-aggregate a rows CSV")
    _add_common(rp)
    rp.add_argument("--rows", required=True, help="rows CSV produced by an experiment")
    rp.add_argument("--by", default=None, help="comma-separated grouping keys (default method)")
    rp.add_argument("--metrics", default=None, help="comma-separated metric columns")

    return parser


class _Options:
    """Flag resolution: explicit CLI value, then config file, then default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
            if not isinstance(loaded, dict):
                raise ValueError(f"{args.config}: config must be a JSON object")
            self.config = loaded

    def get(self, key: str, default):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        return default


def _bridge_spec(opts: _Options) -> ForecasterSpec | None:
    cmd = opts.get("bridge_cmd", None)
    if not cmd:
        return None
    return ForecasterSpec.external(tuple(shlex.split(cmd)))


def _forecaster_from_name(name: str, opts: _Options) -> ForecasterSpec:
    if name == "external":
        spec = _bridge_spec(opts)
        if spec is None:
            raise ValueError("forecaster 'external' needs --bridge-cmd")
        return spec
    if name == "arima":
        return ForecasterSpec.arima(p=5, d=0, q=0)
    if name in ("naive_mean", "naive_last", "linreg", "ets"):
        return ForecasterSpec(kind=name)
    raise ValueError(f"unknown forecaster {name!r}")


def _out_dir(opts: _Options) -> Path:
    out = Path(opts.get("output_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(opts: _Options) -> dict:
    out = _out_dir(opts)
    seed = int(opts.get("seed", 0))
    family = opts.args.family
    if family == "logistic":
        spec = LogisticSpec(
            alpha=float(opts.get("alpha", 0.5)),
            n=int(opts.get("n_points", 100)),
            r=float(opts.get("r", 3.8)),
            seed=seed,
        )
        panel, truth = gen_logistic(spec)
    else:
        spec = MouSpec(
            n_nodes=int(opts.get("n_nodes", 10)),
            density=float(opts.get("density", 0.5)),
            sigma2=float(opts.get("sigma2", 0.2)),
            t_points=int(opts.get("n_points", 100)),
            seed=seed,
        )
        panel, truth, _ = gen_mou(spec)
    panel_path = out / f"{family}_panel.csv"
    truth_path = out / f"{family}_truth.csv"
    write_panel_csv(panel_path, panel)
    write_truth_csv(truth_path, truth)
    return {"panel": str(panel_path), "truth": str(truth_path)}


def _cmd_forecast(opts: _Options) -> dict:
    out = _out_dir(opts)
    panel_arg = opts.get("panel", None)
    if panel_arg:
        panel = read_panel_csv(panel_arg)
    else:
        seed_arg = opts.get("seed", None)
        panel = (
            make_benchmark_panel()
            if seed_arg is None
            else make_benchmark_panel(seed=int(seed_arg))
        )
    names = str(opts.get("forecasters", "naive_mean,naive_last,linreg,arima,ets"))
    specs = []
    for name in [n.strip() for n in names.split(",") if n.strip()]:
        if name == "arima":
            specs.append(ForecasterSpec.arima())
        else:
            specs.append(_forecaster_from_name(name, opts))
    bridge = _bridge_spec(opts)
    if bridge is not None and all(s.kind != "external" for s in specs):
        specs.append(bridge)
    cfg = BenchmarkConfig(
        forecasters=tuple(specs),
        train_fraction=float(opts.get("train_fraction", 0.9)),
        jobs=int(opts.get("jobs", 1)),
    )
    report = run_forecast_benchmark(panel, cfg)
    return write_report(report, out, "forecast")


def _cmd_causality(opts: _Options) -> dict:
    out = _out_dir(opts)
    panel = read_panel_csv(opts.args.panel)
    method = str(opts.get("method", "granger"))
    forecaster = None
    if method == "residual":
        forecaster = _forecaster_from_name(str(opts.get("forecaster", "arima")), opts)
    bh = {"pair": "per_pair", "panel": "per_panel"}[str(opts.get("bh", "pair"))]
    cfg = CausalityConfig(
        method=method,
        alpha=float(opts.get("alpha", 0.05)),
        max_lag=int(opts.get("max_lag", 5)),
        context_w=int(opts.get("context", 30)),
        bh_family=bh,
        forecaster=forecaster,
    )
    graph, tests = infer_graph(panel, cfg)
    edges_path = out / "edges.csv"
    write_edge_tests_csv(edges_path, tests)
    return {
        "edges": str(edges_path),
        "significant": sum(1 for t in tests if t.significant),
        "nodes": len(graph.nodes),
    }


def _cmd_experiment(opts: _Options) -> dict:
    out = _out_dir(opts)
    sweep = opts.args.sweep
    seed = int(opts.get("seed", 0))
    jobs = int(opts.get("jobs", 1))
    trials = int(opts.get("trials", 10))
    forecaster = _forecaster_from_name(str(opts.get("forecaster", "arima")), opts)
    causality_cfg = CausalityConfig(forecaster=forecaster)
    if sweep == "logistic":
        methods = _methods(opts, default="granger")
        cfg = LogisticExperimentConfig(
            trials_per_alpha=trials,
            n_points=int(opts.get("n_points", 100)),
            r=float(opts.get("r", 3.8)),
            methods=methods,
            causality=causality_cfg,
            master_seed=seed,
            jobs=jobs,
        )
        report = run_logistic_experiment(cfg)
        paths = write_report(report, out, "logistic")
    else:
        methods = _methods(opts, default="granger,residual")
        cfg = MouExperimentConfig(
            trials_per_density=trials,
            t_points=int(opts.get("n_points", 100)),
            methods=methods,
            causality=causality_cfg,
            master_seed=seed,
            jobs=jobs,
        )
        report = run_mou_experiment(cfg)
        paths = write_report(report, out, "mou")
        if opts.get("plot", False):
            plot_path = out / "mou_curves.svg"
            emit_density_plot(report, plot_path)
            paths["plot"] = str(plot_path)
    return paths


def _methods(opts: _Options, default: str) -> tuple[str, ...]:
    raw = str(opts.get("methods", default))
    return tuple(m.strip() for m in raw.split(",") if m.strip())


def _cmd_report(opts: _Options) -> dict:
    out = _out_dir(opts)
    rows = read_rows_csv(opts.args.rows)
    by = tuple(str(opts.get("by", "method")).split(","))
    metrics_arg = opts.get("metrics", None)
    if metrics_arg:
        metrics = tuple(str(metrics_arg).split(","))
    else:
        numeric = set()
        for row in rows:
            for key, value in row.items():
                if key in ("trial", "seed") or key in by:
                    continue
                if isinstance(value, (int, float)):
                    numeric.add(key)
        metrics = tuple(sorted(numeric))
    summary = summarize(rows, metrics, by=by)
    path = out / "reaggregated_summary.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"summary": str(path), "groups": len(summary)}


_COMMANDS = {
    "gen": _cmd_gen,
    "forecast": _cmd_forecast,
    "causality": _cmd_causality,
    "experiment": _cmd_experiment,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _Options(args)
        result = _COMMANDS[args.command](opts)
    except Exception as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1
    print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
