"""Repeated, seed-paired comparisons of plain and calibrated BO."""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..benchmarks import BENCHMARKS
from ..optimizer import run_calibrated, run_plain
from .external import ExternalObjective
from .io import (
    AGGREGATE_COLUMNS,
    trace_to_dict,
    write_aggregate_csv,
    write_json,
    write_trace_csv,
)

logger = logging.getLogger(__name__)

_RUNNERS = {"plain": run_plain, "calibrated": run_calibrated}


@dataclass
class AggregateResult:
    """Per-iteration summaries across repetitions; columns keyed by name."""

    columns: dict = field(default_factory=dict)
    seeds: tuple = ()

    def __len__(self):
        return len(self.columns.get("iteration", ()))

    def __getitem__(self, name):
        return self.columns[name]


@dataclass
class ExperimentResult:
    aggregate: AggregateResult
    traces: dict  # (method, seed) -> RunTrace
    files: list


def _mean_se_sd(rows):
    """Column-wise mean, standard error and stddev ignoring NaNs."""
    rows = np.asarray(rows, dtype=float)
    n = np.sum(~np.isnan(rows), axis=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.where(n > 0, np.nanmean(rows, axis=0), np.nan)
        sd = np.where(n > 1, np.nanstd(rows, axis=0, ddof=1), np.nan)
    se = np.where(n > 1, sd / np.sqrt(np.maximum(n, 1)), np.nan)
    return mean, se, sd


def aggregate_curves(best_plain, best_cal, score_plain, score_cal, budget):
    """Aggregate per-seed curves; lists may be empty for a missing method.

    ``best_plain[i]`` and ``best_cal[i]`` must come from the same seed.
    """
    n_iter = budget + 1
    nan = np.full(n_iter, np.nan)
    cols = {"iteration": np.arange(n_iter)}

    def summarize(best, score, tag):
        if len(best):
            mean, se, sd = _mean_se_sd(best)
            cols[f"mean_best_{tag}"], cols[f"se_best_{tag}"] = mean, se
            cols[f"sd2_best_{tag}"] = 2 * sd
            cols[f"mean_score_{tag}"] = _mean_se_sd(score)[0]
        else:
            for key in ("mean_best", "se_best", "sd2_best", "mean_score"):
                cols[f"{key}_{tag}"] = nan

    summarize(best_plain, score_plain, "plain")
    summarize(best_cal, score_cal, "cal")
    if len(best_plain) and len(best_cal):
        diff = np.asarray(best_plain) - np.asarray(best_cal)
        mean, se, sd = _mean_se_sd(diff)
        cols["mean_improvement"], cols["se_improvement"], cols["sd2_improvement"] = mean, se, 2 * sd
    else:
        cols["mean_improvement"] = cols["se_improvement"] = cols["sd2_improvement"] = nan
    return AggregateResult({k: cols[k] for k in AGGREGATE_COLUMNS})


def aggregate(traces, seeds, budget):
    """Aggregate ``{(method, seed): RunTrace}`` over ``seeds`` in order."""
    curves = {m: ([], []) for m in _RUNNERS}
    for method in _RUNNERS:
        for seed in seeds:
            tr = traces.get((method, seed))
            if tr is not None:
                curves[method][0].append(tr.best_by_iteration())
                curves[method][1].append(tr.score_by_iteration())
    (best_p, score_p), (best_c, score_c) = curves["plain"], curves["calibrated"]
    agg = aggregate_curves(best_p, best_c, score_p, score_c, budget)
    agg.seeds = tuple(seeds)
    return agg


def make_objective(config):
    if config.command:
        return ExternalObjective(config.command, timeout=config.timeout)
    return BENCHMARKS[config.benchmark]


def _run_one(args):
    method, objective, space, bo = args
    return _RUNNERS[method](objective, space, bo)


def run_experiment(config, write=True):
    """Run every (method, seed) pair of ``config`` and emit trace/aggregate files.

    Seeds are ``config.bo.seed + i`` for ``i < repetitions``; both methods
    use the same seed, hence the same initial design.
    """
    objective = make_objective(config)
    space = config.search_space()
    jobs = [
        (method, objective, space, replace(config.bo, seed=seed))
        for seed in config.seeds
        for method in config.methods
    ]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]
    traces = {(job[0], job[3].seed): tr for job, tr in zip(jobs, results)}
    agg = aggregate(traces, config.seeds, config.bo.budget)
    files = write_outputs(config, traces, agg, space.dim) if write else []
    return ExperimentResult(agg, traces, files)


def write_outputs(config, traces, agg, dim):
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    files = []
    for (method, seed), tr in sorted(traces.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        stem = out / f"trace_{method}_seed{seed}"
        if config.emit in ("csv", "both"):
            files.append(write_trace_csv(tr, stem.with_suffix(".csv"), dim))
        if config.emit in ("json", "both"):
            files.append(write_json(trace_to_dict(tr), stem.with_suffix(".json")))
    if config.emit in ("csv", "both"):
        files.append(write_aggregate_csv(agg, out / "aggregate.csv"))
    if config.emit in ("json", "both"):
        files.append(
            write_json(
                {"config": config.to_dict(), "seeds": list(agg.seeds), "aggregate": agg.columns},
                out / "aggregate.json",
            )
        )
    logger.info("wrote %d files to %s", len(files), out)
    return files
