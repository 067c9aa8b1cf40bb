"""CSV and JSON emitters for run traces and aggregates.

Floats are written with 17 significant digits so that values survive a
write/read round trip exactly; missing values are written as ``nan``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

AGGREGATE_COLUMNS = (
    "iteration",
    "mean_best_plain",
    "se_best_plain",
    "mean_best_cal",
    "se_best_cal",
    "mean_score_plain",
    "mean_score_cal",
    "mean_improvement",
    "se_improvement",
    # two-standard-deviation bands, appended after the documented columns
    "sd2_best_plain",
    "sd2_best_cal",
    "sd2_improvement",
)


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def trace_columns(dim):
    return (
        ["iteration"]
        + [f"x_{i}" for i in range(dim)]
        + ["y", "best_so_far", "cdf_at_observation", "calibration_score", "recal_mode", "recal_param"]
    )


def trace_rows(trace):
    for r in trace.records:
        yield (
            [r.iteration]
            + list(np.asarray(r.x, dtype=float))
            + [r.y, r.best_so_far, r.cdf, r.score, r.recalibrator.mode, r.recalibrator.param_string()]
        )


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_trace_csv(trace, path, dim=None):
    if dim is None:
        dim = len(trace.records[0].x) if trace.records else 1
    return _write_rows(path, trace_columns(dim), trace_rows(trace))


def read_csv(path):
    """Header and rows of a CSV written by this module (numbers as floats)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = {}
            for key, value in zip(header, raw):
                if key in ("recal_mode", "recal_param"):
                    row[key] = value
                elif key == "iteration":
                    row[key] = int(value)
                else:
                    row[key] = float(value)
            rows.append(row)
    return header, rows


def curves_from_rows(rows, budget=None):
    """Best-so-far and score per iteration from trace rows (forward-filled best)."""
    last = max((r["iteration"] for r in rows), default=-1) if budget is None else budget
    best = np.full(last + 1, np.nan)
    score = np.full(last + 1, np.nan)
    for r in rows:
        best[r["iteration"]] = r["best_so_far"]
        score[r["iteration"]] = r["calibration_score"]
    for t in range(1, len(best)):
        if np.isnan(best[t]):
            best[t] = best[t - 1]
    return best, score


def write_aggregate_csv(aggregate, path):
    cols = aggregate.columns
    rows = ([cols[c][i] for c in AGGREGATE_COLUMNS] for i in range(len(aggregate)))
    return _write_rows(path, AGGREGATE_COLUMNS, rows)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return None if math.isnan(v) else v
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def trace_to_dict(trace):
    return {
        "method": trace.method,
        "config": trace.config.to_dict(),
        "records": [
            {
                "iteration": r.iteration,
                "x": np.asarray(r.x, dtype=float).tolist(),
                "y": r.y,
                "best_so_far": r.best_so_far,
                "cdf_at_observation": r.cdf,
                "base_cdf": r.base_cdf,
                "calibration_score": r.score,
                "recalibrator": r.recalibrator.to_dict(),
            }
            for r in trace.records
        ],
        "rejected": [
            {"iteration": it, "x": np.asarray(x, dtype=float).tolist(), "reason": reason}
            for it, x, reason in trace.rejected
        ],
    }


def write_json(obj, path):
    path = Path(path)
    try:
        path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
