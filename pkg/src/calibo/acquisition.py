"""PI, EI and confidence-bound acquisitions for minimization.

All acquisitions work on any forecast object exposing ``cdf`` and
``quantile``. The optimizer maximizes :func:`acquisition_value`, which for
confidence bounds is the negated lower bound, so that smaller predicted
values are preferred everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr, ndtri

from .calibration import MONOTONE_MAP, RecalibratedForecast
from .exceptions import DomainError
from .surrogate import GaussianForecast

KINDS = ("pi", "ei", "ucb", "lcb")
DEFAULT_ALPHA = 0.975
QUANTILE_GRID_SIZE = 512
_LOG_SQRT_2PI = 0.5 * np.log(2 * np.pi)


@dataclass(frozen=True)
class AcquisitionSpec:
    """Acquisition kind and parameters.

    ``gamma`` selects the Gaussian ``mu +/- gamma * sigma`` form of the
    confidence bound; when it is None the quantile form at ``alpha`` is
    used, which is the form recalibration acts on.
    """

    kind: str = "ucb"
    incumbent: float = np.inf
    epsilon: float = 0.0
    alpha: float = DEFAULT_ALPHA
    gamma: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in KINDS:
            raise ValueError(f"unknown acquisition {self.kind!r}; choose from {KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    def with_incumbent(self, incumbent, epsilon=None):
        eps = self.epsilon if epsilon is None else epsilon
        return replace(self, incumbent=float(incumbent), epsilon=float(eps))


def _threshold(spec):
    return spec.incumbent - spec.epsilon


def prob_improvement(f, spec):
    """P(Y <= incumbent - epsilon)."""
    return f.cdf(_threshold(spec))


def _gaussian_ei(mu, sigma, c):
    z = (c - mu) / sigma
    pdf = np.exp(-0.5 * z * z - _LOG_SQRT_2PI)
    return np.maximum((c - mu) * ndtr(z) + sigma * pdf, 0.0)


def _mapped_gaussian_ei(mu, sigma, knots, c):
    # Y = mu + sigma * Phi^-1(U) where U has the piecewise-linear CDF R, so
    # EI = sum_k slope_k * int_{u_k}^{u_k+1} max(c - mu - sigma Phi^-1(u), 0) du
    mu = np.asarray(mu, dtype=float)[..., None]
    sigma = np.asarray(sigma, dtype=float)[..., None]
    k = np.asarray(knots, dtype=float)
    a, b = k[:-1, 0], k[1:, 0]
    slope = (k[1:, 1] - k[:-1, 1]) / (b - a)
    w = ndtr((c - mu) / sigma)
    top = np.minimum(b, w)
    active = top > a
    top = np.where(active, top, a)
    za, zt = ndtri(a), ndtri(top)
    pdf_a = np.exp(-0.5 * za * za - _LOG_SQRT_2PI)
    pdf_t = np.exp(-0.5 * zt * zt - _LOG_SQRT_2PI)
    seg = (c - mu) * (top - a) - sigma * (pdf_a - pdf_t)
    seg = np.where(active, np.maximum(seg, 0.0), 0.0)
    return np.sum(slope * seg, axis=-1)


def quantile_grid_ei(f, c, size=QUANTILE_GRID_SIZE):
    """Midpoint rule for E[max(c - Y, 0)] over ``size`` quantile levels."""
    levels = (np.arange(size) + 0.5) / size
    q = f[..., None].quantile(levels)
    return np.mean(np.maximum(c - q, 0.0), axis=-1)


def expected_improvement(f, spec):
    """E[max(incumbent - epsilon - Y, 0)].

    Exact for Gaussian forecasts and for Gaussian forecasts under a
    monotone-map recalibrator; any other forecast falls back to
    :func:`quantile_grid_ei`.
    """
    c = _threshold(spec)
    if isinstance(f, GaussianForecast):
        return _gaussian_ei(f.mu, f.sigma, c)
    if (
        isinstance(f, RecalibratedForecast)
        and isinstance(f.base, GaussianForecast)
        and f.recalibrator.mode == MONOTONE_MAP
    ):
        return _mapped_gaussian_ei(f.base.mu, f.base.sigma, f.recalibrator.knots, c)
    return quantile_grid_ei(f, c)


def confidence_bound(f, spec):
    """Upper (``ucb``) or lower (``lcb``) confidence bound of ``f``."""
    if spec.kind not in ("ucb", "lcb"):
        raise ValueError(f"confidence_bound needs kind ucb or lcb, got {spec.kind!r}")
    sign = 1.0 if spec.kind == "ucb" else -1.0
    if spec.gamma is not None:
        if not isinstance(f, GaussianForecast):
            raise TypeError("gamma form needs a Gaussian forecast; use alpha instead")
        return f.mu + sign * spec.gamma * f.sigma
    p = spec.alpha if spec.kind == "ucb" else 1.0 - spec.alpha
    return f.quantile(p)


def gamma_for(alpha):
    """Gaussian width multiplier equivalent to quantile level ``alpha``."""
    return float(ndtri(alpha))


def acquisition_value(f, spec):
    """Score to maximize over candidates (minimization convention)."""
    if spec.kind == "pi":
        return prob_improvement(f, spec)
    if spec.kind == "ei":
        return expected_improvement(f, spec)
    return -confidence_bound(f, replace(spec, kind="lcb"))
