"""Run the Ornstein-Uhlenbeck density sweep for both causality methods.

Usage: python scripts/run_mou_sweep.py [--trials 10] [--seed 0] [--jobs 1]
       [--plot] [--out results]
"""

import argparse

from causalcast.evalharness import (
    MouExperimentConfig,
    emit_density_plot,
    run_mou_experiment,
    write_report,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--plot", action="store_true")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    cfg = MouExperimentConfig(
        trials_per_density=args.trials, master_seed=args.seed, jobs=args.jobs
    )
    report = run_mou_experiment(cfg)
    paths = write_report(report, args.out, "mou")

    print(f"{'method':<10} {'density':>7} {'recall':>7} {'precision':>9} {'sign_mm':>8}")
    for key in sorted(report.aggregates["by_method_density"]):
        entry = report.aggregates["by_method_density"][key]
        if entry["count"] == 0:
            continue
        method, density = key.split("|")
        print(
            f"{method:<10} {density:>7} "
            f"{entry['recall']['mean']:>7.3f} "
            f"{entry['precision']['mean']:>9.3f} "
            f"{entry['sign_mismatch_rate']['mean']:>8.3f}"
        )
    if args.plot:
        plot_path = f"{args.out}/mou_curves.svg"
        emit_density_plot(report, plot_path)
        paths["plot"] = plot_path
    print(f"wrote {', '.join(paths.values())}")


if __name__ == "__main__":
    main()
