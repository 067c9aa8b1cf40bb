"""Search-space descriptors and the mapping to the unit hypercube."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class Dimension:
    """One coordinate of the search space.

    ``scale="log"`` maps the coordinate to the unit interval in log space.
    A ``step`` makes the dimension discrete on the grid
    ``lower, lower + step, ...``; if the step does not divide the range the
    grid stops at the last point below ``upper``.
    """

    lower: float
    upper: float
    scale: str = "linear"
    step: float | None = None
    name: str = ""

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"lower must be < upper, got [{self.lower}, {self.upper}]")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and self.lower <= 0:
            raise ValueError("log-scale dimensions need a positive lower bound")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")

    @property
    def kind(self):
        return "continuous" if self.step is None else "discrete"

    @property
    def n_levels(self):
        if self.step is None:
            return None
        return int(np.floor((self.upper - self.lower) / self.step + 1e-9)) + 1

    def levels(self):
        return self.lower + self.step * np.arange(self.n_levels)

    def to_unit(self, v):
        v = np.asarray(v, dtype=float)
        if self.scale == "log":
            lo, hi = np.log(self.lower), np.log(self.upper)
            return (np.log(v) - lo) / (hi - lo)
        return (v - self.lower) / (self.upper - self.lower)

    def from_unit(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        if self.scale == "log":
            lo, hi = np.log(self.lower), np.log(self.upper)
            v = np.exp(lo + u * (hi - lo))
        else:
            v = self.lower + u * (self.upper - self.lower)
        return self.snap(v)

    def snap(self, v):
        v = np.asarray(v, dtype=float)
        if self.step is None:
            return np.clip(v, self.lower, self.upper)
        k = np.clip(np.round((v - self.lower) / self.step), 0, self.n_levels - 1)
        return self.lower + k * self.step


class SearchSpace:
    """Box of :class:`Dimension` objects; points are rows of a 2-D array."""

    def __init__(self, dimensions):
        self.dimensions = tuple(dimensions)
        if not self.dimensions:
            raise ValueError("search space needs at least one dimension")

    @classmethod
    def box(cls, lower, upper):
        return cls(Dimension(float(lo), float(hi)) for lo, hi in zip(lower, upper))

    def __len__(self):
        return len(self.dimensions)

    def __repr__(self):
        return f"SearchSpace({list(self.dimensions)!r})"

    def __eq__(self, other):
        return isinstance(other, SearchSpace) and self.dimensions == other.dimensions

    @property
    def dim(self):
        return len(self.dimensions)

    @property
    def is_discrete(self):
        return all(d.step is not None for d in self.dimensions)

    def grid_size(self):
        if not self.is_discrete:
            return None
        return int(np.prod([d.n_levels for d in self.dimensions], dtype=float))

    def grid(self):
        """All points of an all-discrete space, in lexicographic order."""
        if not self.is_discrete:
            raise DomainError("only all-discrete spaces have a finite grid")
        return np.array(list(itertools.product(*(d.levels() for d in self.dimensions))), dtype=float)

    def _columns(self, X, fn):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}, got shape {X.shape}")
        return np.column_stack([getattr(d, fn)(X[:, i]) for i, d in enumerate(self.dimensions)])

    def to_unit(self, X):
        return self._columns(X, "to_unit")

    def from_unit(self, U):
        return self._columns(U, "from_unit")

    def snap(self, X):
        return self._columns(X, "snap")

    def snap_unit(self, U):
        """Unit-cube coordinates of the nearest feasible points."""
        return self.to_unit(self.snap(self.from_unit(U)))

    def contains(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = np.ones(len(X), dtype=bool)
        for i, d in enumerate(self.dimensions):
            span = d.upper - d.lower
            ok &= (X[:, i] >= d.lower - tol * span) & (X[:, i] <= d.upper + tol * span)
            if d.step is not None:
                k = (X[:, i] - d.lower) / d.step
                ok &= np.abs(k - np.round(k)) <= 1e-6
        return ok

    def sample_unit(self, rng, n):
        """``n`` feasible points drawn uniformly in unit coordinates."""
        return self.snap_unit(rng.uniform(size=(n, self.dim)))
