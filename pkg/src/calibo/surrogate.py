"""Gaussian-process surrogate with Gaussian predictive forecasts.

Inputs are expected in the unit hypercube (the optimizer takes care of the
affine / log mapping). Outputs are standardized internally, so all kernel
hyperparameters below are expressed in standardized output units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.special import ndtr, ndtri

from .exceptions import DomainError, InvalidDatasetError, InvalidInputError

NOISE_FLOOR = 1e-6
JITTER = 1e-8
DEGENERATE_STD = 1e-12
# smallest predictive stddev handed out, in standardized units
MIN_STD = 1e-12
LML_TIE_TOL = 1e-9

LENGTHSCALE_GRID = np.logspace(-2.0, 1.0, 24)
SIGNAL_VARIANCE_GRID = np.array([0.25, 1.0, 4.0])
NOISE_VARIANCE_GRID = np.logspace(-6.0, -1.0, 8)


@dataclass(frozen=True)
class Kernel:
    """Isotropic squared-exponential kernel plus white noise.

    ``k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 lengthscale^2))``;
    ``noise_variance`` is added on the diagonal of the training covariance.
    """

    lengthscale: float
    signal_variance: float
    noise_variance: float = NOISE_FLOOR

    def __post_init__(self):
        if not self.lengthscale > 0:
            raise ValueError(f"lengthscale must be positive, got {self.lengthscale}")
        if not self.signal_variance > 0:
            raise ValueError(f"signal_variance must be positive, got {self.signal_variance}")
        # tolerate float noise from grid construction
        if not self.noise_variance >= NOISE_FLOOR * (1 - 1e-9):
            raise ValueError(
                f"noise_variance must be >= {NOISE_FLOOR}, got {self.noise_variance}"
            )

    def __call__(self, A, B):
        return self.signal_variance * np.exp(-0.5 * sq_dist(A, B) / self.lengthscale**2)


def sq_dist(A, B):
    """Pairwise squared Euclidean distances between rows of A and B."""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    d = (
        np.sum(A**2, axis=1)[:, None]
        + np.sum(B**2, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.maximum(d, 0.0)


class Dataset:
    """Ordered observations ``(x_t, y_t)``; insertion order is preserved.

    Instances are immutable: ``append`` and ``take`` return new datasets.
    """

    __slots__ = ("_X", "_y")

    def __init__(self, X, y):
        X = np.array(X, dtype=float)
        y = np.array(y, dtype=float).reshape(-1)
        if X.ndim == 1:
            X = X.reshape(len(y), -1) if len(y) else X.reshape(0, max(X.size, 1))
        if X.ndim != 2:
            raise InvalidDatasetError(f"inputs must be a 2-D array, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise InvalidDatasetError(
                f"{X.shape[0]} inputs but {y.shape[0]} outcomes"
            )
        if X.shape[1] < 1:
            raise InvalidDatasetError("input dimension must be at least 1")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidDatasetError("observations must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        self._X = X
        self._y = y

    @classmethod
    def from_pairs(cls, pairs):
        """Build from an iterable of ``(x, y)``; all x must share one dimension."""
        pairs = list(pairs)
        if not pairs:
            raise InvalidDatasetError("cannot infer dimension from zero observations")
        xs = [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in pairs]
        dims = {x.shape for x in xs}
        if len(dims) != 1 or xs[0].ndim != 1:
            raise InvalidDatasetError(f"inconsistent input shapes: {sorted(dims)}")
        return cls(np.vstack(xs), [y for _, y in pairs])

    @property
    def X(self):
        return self._X

    @property
    def y(self):
        return self._y

    @property
    def dim(self):
        return self._X.shape[1]

    def __len__(self):
        return self._y.shape[0]

    def __iter__(self):
        return zip(self._X, self._y)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self._X, other._X) and np.array_equal(self._y, other._y)

    def __repr__(self):
        return f"Dataset(n={len(self)}, dim={self.dim})"

    def append(self, x, y):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise InvalidDatasetError(
                f"expected input of dimension {self.dim}, got shape {x.shape}"
            )
        return Dataset(np.vstack([self._X, x]), np.append(self._y, float(y)))

    def take(self, indices):
        indices = np.asarray(indices, dtype=int)
        return Dataset(self._X[indices], self._y[indices])


class GaussianForecast:
    """Gaussian predictive distribution(s). ``mu``/``sigma`` may be arrays."""

    kind = "gaussian"

    def __init__(self, mu, sigma):
        self.mu = np.asarray(mu, dtype=float)
        self.sigma = np.asarray(sigma, dtype=float)
        if np.any(~(self.sigma > 0)):
            raise ValueError("sigma must be strictly positive")

    def __repr__(self):
        return f"GaussianForecast(mu={self.mu!r}, sigma={self.sigma!r})"

    def __len__(self):
        return self.mu.size

    def __getitem__(self, idx):
        return GaussianForecast(self.mu[idx], self.sigma[idx])

    def cdf(self, y):
        return ndtr((np.asarray(y, dtype=float) - self.mu) / self.sigma)

    def quantile(self, p):
        return self.mu + self.sigma * ndtri(np.asarray(p, dtype=float))

    def scaled(self, factor):
        """Same centre, stddev multiplied by ``factor``."""
        return GaussianForecast(self.mu, self.sigma * factor)


def forecast_cdf(f, y):
    """P(Y <= y) under forecast ``f``; ``+inf`` maps to 1 and ``-inf`` to 0."""
    return f.cdf(y)


def forecast_quantile(f, p):
    """Inverse CDF of ``f`` at probability ``p`` in the open interval (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        raise DomainError(f"quantile level must lie in (0, 1), got {p}")
    return f.quantile(p)


@dataclass(frozen=True, eq=False)
class GpModel:
    """A fitted GP; immutable, cheap to query from several threads."""

    kernel: Kernel
    data: Dataset
    y_mean: float
    y_std: float
    _chol: np.ndarray = field(repr=False)
    _alpha: np.ndarray = field(repr=False)

    @property
    def prior_std(self):
        """Prior predictive stddev of the latent function in output units."""
        return float(np.sqrt(self.kernel.signal_variance) * self.y_std)

    def log_marginal_likelihood(self):
        """Log evidence of the standardized outcomes under this kernel."""
        z = (self.data.y - self.y_mean) / self.y_std
        n = len(z)
        return float(
            -0.5 * z @ self._alpha
            - np.sum(np.log(np.diag(self._chol)))
            - 0.5 * n * np.log(2 * np.pi)
        )

    def predict(self, x, noisy=False):
        """Posterior forecast of the latent objective, or of a new
        observation when ``noisy`` (adds the noise variance).

        A single point (1-D ``x``) gives a scalar forecast, a 2-D array of
        points gives a vectorized one.
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        Xq = np.atleast_2d(x) if x.ndim == 1 else np.asarray(x)
        if x.ndim == 0:
            Xq = x.reshape(1, 1)
        if Xq.ndim != 2 or Xq.shape[1] != self.data.dim:
            raise InvalidInputError(
                f"expected points of dimension {self.data.dim}, got shape {x.shape}"
            )
        if not np.all(np.isfinite(Xq)):
            raise InvalidInputError("query point contains non-finite coordinates")
        Ks = self.kernel(self.data.X, Xq)
        mean = Ks.T @ self._alpha
        v = solve_triangular(self._chol, Ks, lower=True, check_finite=False)
        var = self.kernel.signal_variance - np.sum(v * v, axis=0)
        if noisy:
            var = var + self.kernel.noise_variance
        std = np.sqrt(np.maximum(var, MIN_STD**2))
        mu = self.y_mean + self.y_std * mean
        sigma = self.y_std * std
        if single:
            return GaussianForecast(mu[0], sigma[0])
        return GaussianForecast(mu, sigma)


def standardize(y):
    """Return ``(mean, std)`` used to normalize outcomes."""
    y = np.asarray(y, dtype=float)
    mean = float(np.mean(y))
    std = float(np.std(y))
    if std < DEGENERATE_STD:
        std = 1.0
    return mean, std


def _condition(kernel, X, z):
    K = kernel(X, X)
    K[np.diag_indices_from(K)] += kernel.noise_variance + JITTER
    L, _ = cho_factor(K, lower=True, check_finite=False)
    L = np.tril(L)
    alpha = cho_solve((L, True), z, check_finite=False)
    return L, alpha


class GaussianProcess:
    """Fit configuration for the GP surrogate.

    With ``kernel`` given the hyperparameters are held fixed; otherwise
    they are picked by exhaustive search over the log-spaced grids,
    maximizing the log marginal likelihood. Grid order is
    (lengthscale, signal variance, noise variance) in row-major order and
    ties go to the lowest flat index.
    """

    def __init__(
        self,
        kernel=None,
        lengthscales=LENGTHSCALE_GRID,
        signal_variances=SIGNAL_VARIANCE_GRID,
        noise_variances=NOISE_VARIANCE_GRID,
    ):
        self.kernel = kernel
        self.lengthscales = np.asarray(lengthscales, dtype=float)
        self.signal_variances = np.asarray(signal_variances, dtype=float)
        self.noise_variances = np.maximum(np.asarray(noise_variances, dtype=float), NOISE_FLOOR)

    def __repr__(self):
        if self.kernel is not None:
            return f"GaussianProcess(kernel={self.kernel!r})"
        return (
            f"GaussianProcess(grid={len(self.lengthscales)}x"
            f"{len(self.signal_variances)}x{len(self.noise_variances)})"
        )

    def grid_log_likelihood(self, data):
        """Log marginal likelihood for every grid cell, shape (L, S, N)."""
        mean, std = standardize(data.y)
        z = (data.y - mean) / std
        n = len(z)
        d2 = sq_dist(data.X, data.X)
        C = np.exp(-0.5 * d2[None, :, :] / self.lengthscales[:, None, None] ** 2)
        lam, U = np.linalg.eigh(C)
        lam = np.maximum(lam, 0.0)
        proj = np.einsum("lij,i->lj", U, z) ** 2
        # eigenvalues of s2 * C + (noise + jitter) I
        ev = (
            self.signal_variances[None, :, None, None] * lam[:, None, None, :]
            + (self.noise_variances[None, None, :, None] + JITTER)
        )
        quad = np.sum(proj[:, None, None, :] / ev, axis=-1)
        logdet = np.sum(np.log(ev), axis=-1)
        return -0.5 * quad - 0.5 * logdet - 0.5 * n * np.log(2 * np.pi)

    def select_kernel(self, data):
        lml = self.grid_log_likelihood(data)
        # near-ties within round-off go to the lowest index, so the choice
        # does not flip under rescaling of the outputs
        flat = int(np.flatnonzero(lml.ravel() >= lml.max() - LML_TIE_TOL)[0])
        i, j, k = np.unravel_index(flat, lml.shape)
        return Kernel(
            float(self.lengthscales[i]),
            float(self.signal_variances[j]),
            float(self.noise_variances[k]),
        )

    def fit(self, data):
        if not isinstance(data, Dataset):
            data = Dataset.from_pairs(data)
        if len(data) < 1:
            raise InvalidDatasetError("need at least one observation to fit")
        if np.any(data.X < -1e-9) or np.any(data.X > 1 + 1e-9):
            raise InvalidDatasetError("inputs must lie in the unit hypercube")
        kernel = self.kernel if self.kernel is not None else self.select_kernel(data)
        mean, std = standardize(data.y)
        L, alpha = _condition(kernel, data.X, (data.y - mean) / std)
        L.setflags(write=False)
        alpha.setflags(write=False)
        return GpModel(kernel, data, mean, std, L, alpha)


def fit(data, gp=None):
    """Fit a GP surrogate to ``data`` (default: grid-searched hyperparameters)."""
    return (gp or GaussianProcess()).fit(data)


def predict(model, x, noisy=False):
    return model.predict(x, noisy)
