"""Benchmark every forecaster on a panel and print the MAPE ranking.

Uses the bundled autoregressive panel unless --panel points at a CSV.
An external bridge can join the field via --bridge-cmd.

Usage: python scripts/run_forecast_benchmark.py [--panel panel.csv]
       [--bridge-cmd "python -m causalcast.forecast.mock_bridge"]
       [--train-fraction 0.9] [--out results]
"""

import argparse
import shlex

from causalcast.evalharness import (
    BenchmarkConfig,
    make_benchmark_panel,
    run_forecast_benchmark,
    write_report,
)
from causalcast.forecast import ForecasterSpec
from causalcast.series import read_panel_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--panel", default=None)
    ap.add_argument("--bridge-cmd", default=None)
    ap.add_argument("--train-fraction", type=float, default=0.9)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    panel = read_panel_csv(args.panel) if args.panel else make_benchmark_panel()
    cfg = BenchmarkConfig(train_fraction=args.train_fraction)
    if args.bridge_cmd:
        external = ForecasterSpec.external(tuple(shlex.split(args.bridge_cmd)))
        cfg = BenchmarkConfig(
            forecasters=cfg.forecasters + (external,),
            train_fraction=args.train_fraction,
        )
    report = run_forecast_benchmark(panel, cfg)
    paths = write_report(report, args.out, "forecast")

    ranked = sorted(
        (
            (entry["mape"]["mean"], label)
            for label, entry in report.aggregates["by_forecaster"].items()
            if "mape" in entry
        ),
    )
    print(f"{'forecaster':<14} {'mean MAPE':>10} {'failures':>9}")
    for mean_mape, label in ranked:
        failures = report.aggregates["by_forecaster"][label]["failures"]
        print(f"{label:<14} {mean_mape:>10.4f} {failures:>9}")
    print(f"wrote {paths['rows']} and {paths['summary']}")


if __name__ == "__main__":
    main()
