"""Plain and calibrated Bayesian-optimization loops (minimization).

Both loops share one implementation; the calibrated loop refits a
recalibrator after every model update and scores candidates with the
recalibrated forecasts. Randomness comes from two independent streams
spawned from the seed, one for the initial design and one for the
candidate search, so paired runs share their initial points.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .acquisition import DEFAULT_ALPHA, AcquisitionSpec, acquisition_value
from .calibration import (
    Recalibrator,
    apply_recalibrator,
    calibrate,
    calibration_score,
    canonical_mode,
    canonical_strategy,
)
from .exceptions import ObjectiveError
from .surrogate import Dataset, GaussianProcess

logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-9


@dataclass(frozen=True)
class BoConfig:
    acquisition: str = "ucb"
    budget: int = 30
    initial_points: int = 5
    seed: int = 0
    calibrated: bool = False
    split_strategy: str = "loo"
    recalibrator_mode: str = "monotone-map"
    candidate_count: int = 2048
    local_count: int = 32
    local_scale: float = 0.01
    alpha: float = DEFAULT_ALPHA
    epsilon_scale: float = 0.01
    # above this many observations leave-one-out switches to time-series splits
    loo_max_points: int | None = 25
    # L-BFGS-B polish of the best candidate over continuous coordinates
    refine: bool = True
    refine_maxiter: int = 50

    def __post_init__(self):
        if self.initial_points < 2:
            raise ValueError("initial_points must be >= 2")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be >= 1")
        object.__setattr__(self, "split_strategy", canonical_strategy(self.split_strategy))
        object.__setattr__(self, "recalibrator_mode", canonical_mode(self.recalibrator_mode))
        AcquisitionSpec(self.acquisition, alpha=self.alpha)

    def to_dict(self):
        return asdict(self)


@dataclass
class StepRecord:
    iteration: int
    x: np.ndarray
    y: float
    best_so_far: float
    cdf: float = math.nan
    base_cdf: float = math.nan
    score: float = math.nan
    recalibrator: Recalibrator = field(default_factory=Recalibrator)


@dataclass
class RunTrace:
    method: str
    config: BoConfig
    records: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    data: Dataset | None = None

    @property
    def budget(self):
        return self.config.budget

    def initial_records(self):
        return [r for r in self.records if r.iteration == 0]

    def best_by_iteration(self):
        """Best-so-far after each iteration ``0 .. budget``, forward-filled."""
        return self._by_iteration("best_so_far")

    def score_by_iteration(self):
        """Calibration score to date after each iteration (NaN at 0)."""
        return self._by_iteration("score")

    def _by_iteration(self, attr):
        out = np.full(self.budget + 1, np.nan)
        for r in self.records:
            out[r.iteration] = getattr(r, attr)
        for t in range(1, len(out)):
            if np.isnan(out[t]) and attr == "best_so_far":
                out[t] = out[t - 1]
        return out

    def same_path(self, other):
        """True when both traces visited the same points with the same results."""
        if len(self.records) != len(other.records):
            return False
        for a, b in zip(self.records, other.records):
            fields_a = (a.iteration, a.y, a.best_so_far, a.cdf, a.score)
            fields_b = (b.iteration, b.y, b.best_so_far, b.cdf, b.score)
            if not np.array_equal(a.x, b.x) or not np.array_equal(
                np.asarray(fields_a), np.asarray(fields_b), equal_nan=True
            ):
                return False
        return True


def rng_streams(seed):
    """Independent generators for the initial design and the candidate search."""
    init_seq, loop_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(loop_seq)


def initial_design(space, n, seed):
    """``n`` feasible points sampled uniformly (log dims uniform in log)."""
    if n < 2:
        raise ValueError("need at least two initial points")
    init_rng, _ = rng_streams(seed)
    return space.from_unit(space.sample_unit(init_rng, n))


def candidate_points(space, rng, config, data=None):
    """Unit-cube candidates: global uniform draws plus jitter around the best point."""
    size = space.grid_size()
    if size is not None and size <= config.candidate_count:
        return space.to_unit(space.grid())
    cand = [space.sample_unit(rng, config.candidate_count)]
    if data is not None and len(data) and config.local_count > 0:
        best = data.X[np.argmin(data.y)]
        jitter = rng.normal(0.0, config.local_scale, size=(config.local_count, space.dim))
        cand.append(space.snap_unit(np.clip(best + jitter, 0.0, 1.0)))
    return np.vstack(cand)


def maximize_acquisition(forecaster, candidates, spec):
    """Index and value of the best candidate; ties go to the lowest index.

    ``forecaster`` maps an (n, D) array of unit-cube points to a vectorized
    forecast (typically a fitted model's ``predict`` composed with a
    recalibrator).
    """
    values = np.asarray(acquisition_value(forecaster(candidates), spec), dtype=float)
    values = np.where(np.isnan(values), -np.inf, values)
    i = int(np.argmax(values))
    return i, float(values[i])


def refine_candidate(forecaster, u0, spec, free, maxiter=50):
    """Polish unit point ``u0`` over the ``free`` coordinates with L-BFGS-B.

    Returns ``(u, value)``; ``u0`` is kept unless the polish strictly
    improves the acquisition.
    """
    u0 = np.asarray(u0, dtype=float)
    free = np.asarray(free, dtype=bool)

    def value(v):
        u = u0.copy()
        u[free] = v
        a = float(acquisition_value(forecaster(u[None, :]), spec)[0])
        return a if math.isfinite(a) else -np.inf

    v0 = value(u0[free])
    if not free.any() or not math.isfinite(v0):
        return u0, v0
    res = minimize(
        lambda v: -value(v),
        u0[free],
        method="L-BFGS-B",
        bounds=[(0.0, 1.0)] * int(free.sum()),
        options={"maxiter": maxiter},
    )
    v1 = value(np.clip(res.x, 0.0, 1.0))
    if v1 > v0:
        u = u0.copy()
        u[free] = np.clip(res.x, 0.0, 1.0)
        return u, v1
    return u0, v0


def _evaluate(objective, x):
    try:
        y = float(objective(x))
    except ObjectiveError as exc:
        return None, str(exc)
    if not math.isfinite(y):
        return None, f"non-finite value {y!r}"
    return y, ""


class _Loop:
    def __init__(self, objective, space, config, gp, method):
        self.objective = objective
        self.space = space
        self.config = config
        self.gp = gp or GaussianProcess()
        self.trace = RunTrace(method, config)
        self.init_rng, self.loop_rng = rng_streams(config.seed)
        self.free = np.array([d.step is None for d in space.dimensions])

    def evaluate(self, u, iteration, rng):
        """Objective value at unit point ``u``; one uniform retry on failure."""
        for attempt in range(2):
            x = self.space.from_unit(u)[0]
            y, reason = _evaluate(self.objective, x)
            if y is not None:
                return u, y
            logger.warning(
                "iteration %d: rejected evaluation at %s (%s)", iteration, x.tolist(), reason
            )
            self.trace.rejected.append((iteration, x, reason))
            u = self.space.sample_unit(rng, 1)
        return None, None

    def strategy(self, n):
        cfg = self.config
        if cfg.split_strategy == "loo" and cfg.loo_max_points is not None and n > cfg.loo_max_points:
            return "time-series"
        return cfg.split_strategy

    def recalibrate(self, data):
        if self.trace.method != "calibrated":
            return Recalibrator()
        return calibrate(self.gp, data, self.strategy(len(data)), self.config.recalibrator_mode)

    def run(self):
        cfg, space = self.config, self.space
        units, ys = [], []
        for u in space.sample_unit(self.init_rng, cfg.initial_points):
            u, y = self.evaluate(u[None, :], 0, self.init_rng)
            if y is not None:
                units.append(u[0])
                ys.append(y)
        if len(ys) < 1:
            raise ObjectiveError("every initial evaluation failed")
        data = Dataset(np.vstack(units), ys)
        best = float(np.min(ys))
        for u, y in zip(units, ys):
            self.trace.records.append(StepRecord(0, space.from_unit(u)[0], y, best))

        model = self.gp.fit(data)
        recal = self.recalibrate(data)
        cdfs, base_cdfs = [], []
        base_spec = AcquisitionSpec(cfg.acquisition, alpha=cfg.alpha)
        for it in range(1, cfg.budget + 1):
            spec = base_spec.with_incumbent(best, cfg.epsilon_scale * model.y_std)
            cand = candidate_points(space, self.loop_rng, cfg, data)
            forecaster = lambda U: apply_recalibrator(recal, model.predict(U, noisy=True))
            i, _ = maximize_acquisition(forecaster, cand, spec)
            u = cand[i : i + 1]
            if cfg.refine and self.free.any():
                u = refine_candidate(forecaster, u[0], spec, self.free, cfg.refine_maxiter)[0][None, :]
            if np.any(np.max(np.abs(data.X - u), axis=1) <= DUPLICATE_TOL):
                jitter = self.loop_rng.normal(0.0, cfg.local_scale, size=u.shape)
                u = space.snap_unit(np.clip(u + jitter, 0.0, 1.0))
            u, y = self.evaluate(u, it, self.loop_rng)
            if y is None:
                continue
            base = model.predict(u[0], noisy=True)
            f_base = float(base.cdf(y))
            f_used = float(apply_recalibrator(recal, base).cdf(y))
            cdfs.append(f_used)
            base_cdfs.append(f_base)
            best = min(best, y)
            self.trace.records.append(
                StepRecord(
                    it,
                    space.from_unit(u)[0],
                    y,
                    best,
                    cdf=f_used,
                    base_cdf=f_base,
                    score=calibration_score(cdfs).score,
                    recalibrator=recal,
                )
            )
            data = data.append(u[0], y)
            model = self.gp.fit(data)
            recal = self.recalibrate(data)
        self.trace.data = Dataset(space.from_unit(data.X), data.y)
        return self.trace


def run_plain(objective, space, config, gp=None):
    """Standard BO loop: acquisition on the raw surrogate."""
    return _Loop(objective, space, replace(config, calibrated=False), gp, "plain").run()


def run_calibrated(objective, space, config, gp=None):
    """BO loop with a cross-validated recalibrator refit at every step.

    With ``config.recalibrator_mode == "identity"`` the recalibrator is
    always the identity and the run reproduces :func:`run_plain`.
    """
    return _Loop(objective, space, replace(config, calibrated=True), gp, "calibrated").run()


def run(objective, space, config, gp=None):
    return (run_calibrated if config.calibrated else run_plain)(objective, space, config, gp)

