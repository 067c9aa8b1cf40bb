"""Quantile recalibration of surrogate forecasts.

The recalibration set is built by cross-validation over the observed data
(leave-one-out or expanding-window splits), so no extra objective
evaluations are spent. Two recalibrators are available: a monotone map on
probabilities fit by isotonic regression, and a rescaling of the Gaussian
predictive stddev.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .exceptions import DomainError, TooFewObservationsError
from .surrogate import Dataset, GaussianForecast, GaussianProcess

DEFAULT_LEVELS = np.arange(1, 20) / 20.0
SCALE_GRID = np.logspace(np.log10(1 / 8), np.log10(8), 41)

IDENTITY = "identity"
SIGMA_RESCALE = "sigma-rescale"
MONOTONE_MAP = "monotone-map"
MODES = (IDENTITY, SIGMA_RESCALE, MONOTONE_MAP)

_MODE_ALIASES = {
    "sigma": SIGMA_RESCALE,
    "isotonic": MONOTONE_MAP,
    "none": IDENTITY,
}

_SPLIT_ALIASES = {"ts": "time-series", "timeseries": "time-series"}
MIN_SPLIT_SIZE = {"loo": 3, "time-series": 4}


def canonical_mode(mode):
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown recalibrator mode {mode!r}; choose from {MODES}")
    return mode


def canonical_strategy(strategy):
    strategy = _SPLIT_ALIASES.get(strategy, strategy)
    if strategy not in MIN_SPLIT_SIZE:
        raise ValueError(f"unknown split strategy {strategy!r}")
    return strategy


# ---------------------------------------------------------------------------
# splits and recalibration data


def create_splits(data: Dataset, strategy: str = "loo"):
    """Train/test splits of ``data``.

    ``loo`` holds out each observation once. ``time-series`` trains on the
    first ``t`` observations and tests on observation ``t + 1`` for
    ``t = 2 .. N - 1``, respecting query order.
    """
    strategy = canonical_strategy(strategy)
    n = len(data)
    if n < MIN_SPLIT_SIZE[strategy]:
        raise TooFewObservationsError(
            f"{strategy} splits need at least {MIN_SPLIT_SIZE[strategy]} observations, got {n}"
        )
    idx = np.arange(n)
    if strategy == "loo":
        return [(data.take(np.delete(idx, i)), data.take([i])) for i in range(n)]
    return [(data.take(idx[:t]), data.take([t])) for t in range(2, n)]


def empirical_level(cdf_values, p):
    """Fraction of ``cdf_values`` that are ``<= p`` (vectorized over ``p``)."""
    cdf_values = np.asarray(cdf_values, dtype=float).ravel()
    if cdf_values.size == 0:
        raise ValueError("empirical_level needs at least one value")
    p = np.asarray(p, dtype=float)
    counts = np.searchsorted(np.sort(cdf_values), p, side="right")
    return counts / cdf_values.size


class RecalPair(NamedTuple):
    cdf_value: float
    empirical_level: float


def cross_validated_cdf(gp: GaussianProcess, data: Dataset, strategy: str = "loo"):
    """CDF of each held-out outcome under a surrogate refit on its train fold."""
    values = []
    for train, test in create_splits(data, strategy):
        model = gp.fit(train)
        values.extend(np.atleast_1d(model.predict(test.X, noisy=True).cdf(test.y)))
    return np.asarray(values, dtype=float)


def recal_pairs(cdf_values):
    """Pair every CDF value with the pooled empirical level at that value."""
    cdf_values = np.asarray(cdf_values, dtype=float)
    levels = empirical_level(cdf_values, cdf_values)
    return [RecalPair(float(c), float(l)) for c, l in zip(cdf_values, levels)]


def build_recal_dataset(gp: GaussianProcess, data: Dataset, strategy: str = "loo"):
    return recal_pairs(cross_validated_cdf(gp, data, strategy))


# ---------------------------------------------------------------------------
# scores


@dataclass(frozen=True)
class CalibrationReport:
    levels: np.ndarray
    empirical: np.ndarray
    score: float


def calibration_score(cdf_values, levels=DEFAULT_LEVELS):
    """Sum of squared gaps between confidence levels and empirical levels."""
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0 or np.any(np.diff(levels) <= 0):
        raise ValueError("levels must be non-empty and strictly increasing")
    if levels[0] < 0 or levels[-1] > 1:
        raise ValueError("levels must lie in [0, 1]")
    emp = empirical_level(cdf_values, levels)
    return CalibrationReport(levels, emp, float(np.sum((levels - emp) ** 2)))


def pair_calibration_error(pairs, recalibrator=None):
    """In-sample error ``sum_t (level_t - R(F_t))^2`` over recalibration pairs.

    This is the objective the isotonic fit minimizes over monotone maps,
    so a monotone-map recalibrator never scores worse than the identity.
    """
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    mapped = arr[:, 0] if recalibrator is None else recalibrator(arr[:, 0])
    return float(np.sum((arr[:, 1] - mapped) ** 2))


# ---------------------------------------------------------------------------
# recalibrators


def pava(y, w=None):
    """Weighted least-squares nondecreasing fit (pool adjacent violators)."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    means, weights, sizes = [], [], []
    for yi, wi in zip(y, w):
        means.append(yi)
        weights.append(wi)
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, s2 = means.pop(), weights.pop(), sizes.pop()
            m1, w1, s1 = means.pop(), weights.pop(), sizes.pop()
            wt = w1 + w2
            means.append((m1 * w1 + m2 * w2) / wt)
            weights.append(wt)
            sizes.append(s1 + s2)
    return np.repeat(means, sizes)


@dataclass(frozen=True)
class Recalibrator:
    """Monotone map ``R: [0, 1] -> [0, 1]`` composed with forecast CDFs.

    ``sigma-rescale`` is the map ``u -> Phi(Phi^-1(u) / scale)``, which on a
    Gaussian forecast is the same as multiplying its stddev by ``scale``.
    """

    mode: str = IDENTITY
    knots: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", canonical_mode(self.mode))
        if self.mode == SIGMA_RESCALE and not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.mode == MONOTONE_MAP:
            k = np.asarray(self.knots, dtype=float)
            if k.ndim != 2 or k.shape[1] != 2 or len(k) < 2:
                raise ValueError("monotone map needs at least two (x, y) knots")
            if k[0, 0] != 0 or k[0, 1] != 0 or k[-1, 0] != 1 or k[-1, 1] != 1:
                raise ValueError("monotone map must pass through (0, 0) and (1, 1)")
            if np.any(np.diff(k[:, 0]) <= 0) or np.any(np.diff(k[:, 1]) < 0):
                raise ValueError("knots must be increasing in x and nondecreasing in y")
            object.__setattr__(self, "knots", tuple(map(tuple, k.tolist())))

    @property
    def _xy(self):
        k = np.asarray(self.knots, dtype=float)
        return k[:, 0], k[:, 1]

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.mode == IDENTITY:
            return u
        if self.mode == SIGMA_RESCALE:
            return ndtr(ndtri(u) / self.scale)
        xs, ys = self._xy
        return np.interp(u, xs, ys)

    def inverse(self, p):
        """Generalized inverse ``inf{u : R(u) >= p}``."""
        p = np.asarray(p, dtype=float)
        if self.mode == IDENTITY:
            return p
        if self.mode == SIGMA_RESCALE:
            return ndtr(ndtri(p) * self.scale)
        xs, ys = self._xy
        k = np.clip(np.searchsorted(ys, p, side="left"), 1, len(ys) - 1)
        y0, y1 = ys[k - 1], ys[k]
        x0, x1 = xs[k - 1], xs[k]
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(y1 > y0, (p - y0) / (y1 - y0), 1.0)
        out = x0 + np.clip(t, 0.0, 1.0) * (x1 - x0)
        return np.where(p <= 0, 0.0, np.where(p >= 1, 1.0, out))

    def apply(self, f):
        return apply_recalibrator(self, f)

    def param_string(self):
        """Compact text form used in trace files."""
        if self.mode == IDENTITY:
            return ""
        if self.mode == SIGMA_RESCALE:
            return format(self.scale, ".17g")
        return ";".join(f"{x:.17g}:{y:.17g}" for x, y in self.knots)

    @classmethod
    def from_param_string(cls, mode, text):
        mode = canonical_mode(mode)
        if mode == IDENTITY:
            return cls()
        if mode == SIGMA_RESCALE:
            return cls(mode, scale=float(text))
        knots = [tuple(float(v) for v in item.split(":")) for item in text.split(";")]
        return cls(mode, knots=tuple(knots))

    def to_dict(self):
        if self.mode == MONOTONE_MAP:
            return {"mode": self.mode, "knots": [list(k) for k in self.knots]}
        if self.mode == SIGMA_RESCALE:
            return {"mode": self.mode, "scale": self.scale}
        return {"mode": self.mode}


class RecalibratedForecast:
    """Forecast with ``cdf = R(F(y))`` and ``quantile(p) = F^-1(R^-1(p))``."""

    kind = "recalibrated"

    def __init__(self, base, recalibrator):
        self.base = base
        self.recalibrator = recalibrator

    def __len__(self):
        return len(self.base)

    def __getitem__(self, idx):
        return RecalibratedForecast(self.base[idx], self.recalibrator)

    def cdf(self, y):
        return self.recalibrator(self.base.cdf(y))

    def quantile(self, p):
        return self.base.quantile(self.recalibrator.inverse(p))


def apply_recalibrator(r: Recalibrator, f):
    """Compose ``r`` with forecast ``f``.

    Sigma rescaling keeps Gaussian forecasts Gaussian; the identity returns
    ``f`` itself.
    """
    if r.mode == IDENTITY:
        return f
    if r.mode == SIGMA_RESCALE and isinstance(f, GaussianForecast):
        return f.scaled(r.scale)
    return RecalibratedForecast(f, r)


def _fit_monotone(cdf_values, levels):
    # endpoints are pinned to (0, 0) and (1, 1); fit only the interior
    inner = (cdf_values > 0) & (cdf_values < 1)
    x, y = cdf_values[inner], levels[inner]
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    knots = [(0.0, 0.0)]
    if x.size:
        ux, start, counts = np.unique(x, return_index=True, return_counts=True)
        ymean = np.add.reduceat(y, start) / counts
        fitted = np.clip(pava(ymean, counts), 0.0, 1.0)
        knots += list(zip(ux.tolist(), fitted.tolist()))
    knots.append((1.0, 1.0))
    fitted = Recalibrator(MONOTONE_MAP, knots=tuple(knots))
    # isotonic fits minimize pair error, not the level score; at small N the
    # latter can rise, in which case the identity map is kept
    if calibration_score(fitted(cdf_values)).score > calibration_score(cdf_values).score:
        return Recalibrator(MONOTONE_MAP, knots=((0.0, 0.0), (1.0, 1.0)))
    return fitted


def _fit_scale(cdf_values, levels=DEFAULT_LEVELS, scales=SCALE_GRID):
    z = ndtri(np.clip(cdf_values, 0.0, 1.0))
    scores = np.array([calibration_score(ndtr(z / s), levels).score for s in scales])
    best = np.flatnonzero(scores <= scores.min() + 1e-15)
    # least intervention among equally good scales
    pick = best[np.argmin(np.abs(np.log(scales[best])))]
    return Recalibrator(SIGMA_RESCALE, scale=float(scales[pick]))


def fit_recalibrator(pairs: Sequence[RecalPair], mode: str = SIGMA_RESCALE):
    """Train a recalibrator on ``(cdf_value, empirical_level)`` pairs."""
    mode = canonical_mode(mode)
    if mode == IDENTITY:
        return Recalibrator()
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    minimum = 3 if mode == MONOTONE_MAP else 1
    if len(arr) < minimum:
        raise TooFewObservationsError(f"{mode} needs at least {minimum} pairs, got {len(arr)}")
    if mode == MONOTONE_MAP:
        return _fit_monotone(arr[:, 0], arr[:, 1])
    return _fit_scale(arr[:, 0])


def calibrate(gp: GaussianProcess, data: Dataset, strategy="loo", mode=SIGMA_RESCALE):
    """Cross-validated recalibrator for ``gp`` on ``data``.

    Falls back to the identity when the data are too few to split.
    """
    strategy = canonical_strategy(strategy)
    mode = canonical_mode(mode)
    if mode == IDENTITY or len(data) < MIN_SPLIT_SIZE[strategy]:
        return Recalibrator()
    return fit_recalibrator(build_recal_dataset(gp, data, strategy), mode)


# ---------------------------------------------------------------------------
# expectations under a quantile-calibrated model (finite spaces)


class ExpectationCheck(NamedTuple):
    lhs: float
    rhs: float


@dataclass(frozen=True)
class DiscreteProblem:
    """A joint law over finite X and non-negative finite Y plus a model Q."""

    p_x: np.ndarray  # (n_inputs,)
    p_y_given_x: np.ndarray  # (n_inputs, n_outcomes)
    q_y_given_x: np.ndarray  # (n_inputs, n_outcomes)
    outcomes: np.ndarray  # (n_outcomes,), sorted, >= 0

    def expectation_true(self):
        joint = self.p_x[:, None] * self.p_y_given_x
        return float(np.sum(joint.sum(axis=0) * self.outcomes))

    def expectation_model(self):
        inner = self.q_y_given_x @ self.outcomes
        return float(np.sum(self.p_x * inner))

    def calibration_violation(self, decimals=12):
        """Largest ``|P(Y >= y | Q(Y >= y | X) = p) - p|`` over all y and p."""
        p_tail = np.cumsum(self.p_y_given_x[:, ::-1], axis=1)[:, ::-1]
        q_tail = np.cumsum(self.q_y_given_x[:, ::-1], axis=1)[:, ::-1]
        worst = 0.0
        for j in range(len(self.outcomes)):
            qs = np.round(q_tail[:, j], decimals)
            for p in np.unique(qs):
                sel = qs == p
                mass = self.p_x[sel].sum()
                if mass <= 0:
                    continue
                cond = np.sum(self.p_x[sel] * p_tail[sel, j]) / mass
                worst = max(worst, abs(cond - p))
        return worst


def make_discrete_problem(num_inputs, num_outcomes, seed=None, model="grouped", num_groups=None):
    """Random finite joint law and a quantile-calibrated model for it.

    ``model`` picks Q: ``true`` uses P(Y|X) itself, ``marginal`` uses P(Y)
    for every input, ``grouped`` pools P(Y|X) within a random partition
    of the inputs.
    """
    if num_inputs < 2 or num_outcomes < 2:
        raise DomainError("need at least two inputs and two outcomes")
    rng = np.random.default_rng(seed)
    p_x = rng.dirichlet(np.ones(num_inputs))
    p_y_given_x = rng.dirichlet(np.ones(num_outcomes), size=num_inputs)
    outcomes = np.sort(rng.uniform(0.0, 10.0, size=num_outcomes))
    if model == "true":
        groups = np.arange(num_inputs)
    elif model == "marginal":
        groups = np.zeros(num_inputs, dtype=int)
    elif model == "grouped":
        k = num_groups or int(rng.integers(1, num_inputs + 1))
        groups = rng.integers(0, k, size=num_inputs)
    else:
        raise ValueError(f"unknown model construction {model!r}")
    q = np.empty_like(p_y_given_x)
    for g in np.unique(groups):
        sel = groups == g
        w = p_x[sel]
        q[sel] = (w @ p_y_given_x[sel]) / w.sum()
    return DiscreteProblem(p_x, p_y_given_x, q, outcomes)


def proposition1_check(num_inputs, num_outcomes, seed=None, model="grouped"):
    """Exact ``(E_P[Y], E_{x~P(X)} E_{y~Q(Y|x)}[y])`` for a random calibrated Q."""
    prob = make_discrete_problem(num_inputs, num_outcomes, seed, model)
    return ExpectationCheck(prob.expectation_true(), prob.expectation_model())
