"""Command-line entry point: ``calibo run | bench list | check prop1 | score``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..benchmarks import BENCHMARKS
from ..calibration import DEFAULT_LEVELS, calibration_score, proposition1_check
from .config import ConfigError, ExperimentConfig, load_config
from .experiment import run_experiment
from .io import read_csv

PROP1_TOLERANCE = 1e-12


def _cmd_run(args):
    if args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig(benchmark=args.bench or "forrester")
    overrides = dict(
        seed=args.seed,
        repetitions=args.reps,
        budget=args.budget,
        initial_points=args.init,
        acquisition=args.acquisition,
        calibrated=args.calibrated,
        splits=args.splits,
        recal=args.recal,
        jobs=args.jobs,
        out=Path(args.out) if args.out else None,
        emit=args.emit,
    )
    if args.bench and args.config:
        overrides["benchmark"] = args.bench
    config = config.with_overrides(**overrides)
    result = run_experiment(config)
    agg = result.aggregate
    last = len(agg) - 1
    print(f"wrote {len(result.files)} files to {config.out}")
    for tag, name in (("plain", "plain"), ("cal", "calibrated")):
        mean = agg[f"mean_best_{tag}"][last]
        if not np.isnan(mean):
            print(
                f"{name:>10}: final best {mean:.6g} (se {agg[f'se_best_{tag}'][last]:.3g}), "
                f"final score {agg[f'mean_score_{tag}'][last]:.4g}"
            )
    return 0


def _cmd_bench(args):
    for name, b in sorted(BENCHMARKS.items()):
        lo = [d.lower for d in b.space.dimensions]
        hi = [d.upper for d in b.space.dimensions]
        box = f"[{lo[0]:g}, {hi[0]:g}]" if len(set(lo)) == 1 and len(set(hi)) == 1 else str(list(zip(lo, hi)))
        print(f"{name:<10} D={b.dim:<3} f*={b.minimum:<20.12g} domain={box}^{b.dim}  {b.description}")
    return 0


def _cmd_check(args):
    worst = 0.0
    for i in range(args.trials):
        lhs, rhs = proposition1_check(args.inputs, args.outcomes, seed=args.seed + i, model=args.model)
        gap = abs(lhs - rhs)
        worst = max(worst, gap)
        print(f"seed {args.seed + i:>4}: E_P[Y] = {lhs:.15f}  E_x E_Q[Y] = {rhs:.15f}  |diff| = {gap:.3e}")
    ok = worst < PROP1_TOLERANCE
    print(f"{'PASS' if ok else 'FAIL'}: max |diff| = {worst:.3e} (tolerance {PROP1_TOLERANCE:g})")
    return 0 if ok else 1


def _cmd_score(args):
    _, rows = read_csv(args.trace)
    cdfs = np.array([r["cdf_at_observation"] for r in rows if r["iteration"] > 0])
    cdfs = cdfs[~np.isnan(cdfs)]
    if cdfs.size == 0:
        print("no scored observations in trace", file=sys.stderr)
        return 1
    levels = np.arange(1, args.levels + 1) / (args.levels + 1) if args.levels else DEFAULT_LEVELS
    report = calibration_score(cdfs, levels)
    print("level      empirical")
    for p, q in zip(report.levels, report.empirical):
        print(f"{p:<10.4f} {q:.4f}")
    print(f"calibration score over {cdfs.size} observations: {report.score:.6g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="calibo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a calibrated-vs-plain experiment")
    run.add_argument("config", nargs="?", help="experiment config file")
    run.add_argument("--bench", help="benchmark name (when no config file is given)")
    run.add_argument("--seed", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--budget", type=int)
    run.add_argument("--init", type=int, help="number of initial points")
    run.add_argument("--acquisition", choices=("ucb", "ei", "pi"))
    run.add_argument("--calibrated", choices=("on", "off", "both"))
    run.add_argument("--splits", choices=("loo", "ts"))
    run.add_argument("--recal", choices=("sigma", "isotonic"))
    run.add_argument("--jobs", type=int)
    run.add_argument("--out")
    run.add_argument("--emit", choices=("csv", "json", "both"))
    run.set_defaults(func=_cmd_run)

    bench = sub.add_parser("bench", help="benchmark functions")
    bench.add_argument("action", choices=("list",))
    bench.set_defaults(func=_cmd_bench)

    check = sub.add_parser("check", help="numerical checks")
    check.add_argument("what", choices=("prop1",))
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--trials", type=int, default=20)
    check.add_argument("--inputs", type=int, default=5)
    check.add_argument("--outcomes", type=int, default=7)
    check.add_argument("--model", choices=("grouped", "true", "marginal"), default="grouped")
    check.set_defaults(func=_cmd_check)

    score = sub.add_parser("score", help="calibration score of a trace CSV")
    score.add_argument("trace")
    score.add_argument("--levels", type=int, help="use m equally spaced levels j/(m+1)")
    score.set_defaults(func=_cmd_score)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, KeyError, OSError) as exc:
        print(f"calibo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
