"""Command-line entry point: ``simulate``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from oect_rc.harness import (
    AXES,
    ExperimentConfig,
    export_results,
    export_trials,
    forecast_with_rng,
    load_config,
    sweep,
    trial_rng,
)


def _parse_values(text: str, axis: str) -> list:
    items = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not items:
        raise argparse.ArgumentTypeError("--values needs at least one entry")
    if axis == "n":
        return [int(tok) for tok in items]
    return [float(tok) for tok in items]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="simulate",
        description="Run OECT / tanh reservoir forecasting trials on the Lorenz system.",
    )
    ap.add_argument("--config", type=Path, help="JSON experiment configuration")
    ap.add_argument("--axis", choices=AXES, help="parameter to sweep")
    ap.add_argument("--values", help="comma-separated sweep values")
    ap.add_argument("--trials", type=int, help="trials per value (overrides config)")
    ap.add_argument("--seed", type=int, help="master seed (overrides config)")
    ap.add_argument("--kind", choices=("oect", "tanh"), help="reservoir kind (overrides config)")
    ap.add_argument("--out", type=Path, default=Path("results.csv"), help="summary CSV path")
    ap.add_argument("--trial-dump", type=Path, help="optional per-trial CSV")
    ap.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    ap.add_argument("--plot", action="store_true",
                    help="also render <out>.png (sweep) and <out>_forecast.png (trial 0)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.kind is not None:
        overrides["kind"] = args.kind
    cfg = dataclasses.replace(cfg, **overrides)

    if (args.axis is None) != (args.values is None):
        print("simulate: --axis and --values must be given together", file=sys.stderr)
        return 2
    if args.axis is None:
        axis, values = "n", [cfg.n]
    else:
        axis, values = args.axis, _parse_values(args.values, args.axis)

    table = sweep(cfg, axis, values, workers=args.workers)
    export_results(table, args.out)
    if args.trial_dump:
        export_trials(table, args.trial_dump)
    for row in table.rows:
        print(f"{axis}={row.value}: FH {row.mean_fh:.3f} +/- {row.std_fh:.3f} "
              f"({row.trials} trials, {row.failures} failed)")

    if args.plot:
        from oect_rc.plots import plot_forecast, plot_sweep

        stem = args.out.with_suffix("")
        plot_sweep({cfg.kind: table}, stem.with_suffix(".png"))
        fc = forecast_with_rng(cfg.with_axis(axis, values[0]), trial_rng(cfg.master_seed, 0, 0))
        plot_forecast(fc.truth, {cfg.kind: fc.prediction}, f"{stem}_forecast.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
