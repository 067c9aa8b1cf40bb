"""Synthetic objectives with known global minima.

Standard literature forms; the minima below were located by dense grid
search followed by local refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError
from .space import SearchSpace

FORRESTER_ARGMIN = 0.7572487575887744
FORRESTER_MIN = -6.020740055767083
CAMEL_ARGMIN = (0.08984200544317693, -0.712656409067566)
CAMEL_MIN = -1.031628453489877


def _check_box(x, lower, upper, name):
    x = np.asarray(x, dtype=float)
    lower = np.broadcast_to(lower, x.shape)
    upper = np.broadcast_to(upper, x.shape)
    if not np.all(np.isfinite(x)) or np.any(x < lower) or np.any(x > upper):
        raise DomainError(f"{name}: point {x.tolist()} outside domain")
    return x


def forrester(x):
    """``(6x - 2)^2 sin(12x - 4)`` on [0, 1]."""
    x = float(_check_box(np.ravel(x)[0] if np.ndim(x) else x, 0.0, 1.0, "forrester"))
    return (6.0 * x - 2.0) ** 2 * np.sin(12.0 * x - 4.0)


def six_hump_camel(x):
    x1, x2 = _check_box(x, (-3.0, -2.0), (3.0, 2.0), "six_hump_camel")
    return float(
        (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2 + x1 * x2 + (-4.0 + 4.0 * x2**2) * x2**2
    )


def ackley(x):
    x = _check_box(np.atleast_1d(x), -32.768, 32.768, "ackley")
    d = x.size
    return float(
        20.0
        + np.e
        - 20.0 * np.exp(-0.2 * np.sqrt(np.sum(x**2) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / d)
    )


def alpine1(x):
    x = _check_box(np.atleast_1d(x), 0.0, 10.0, "alpine1")
    return float(np.sum(np.abs(x * np.sin(x) + 0.1 * x)))


@dataclass(frozen=True)
class Benchmark:
    name: str
    dim: int
    function: Callable
    space: SearchSpace
    minimizers: tuple
    minimum: float
    description: str = ""

    def __call__(self, x):
        return self.function(x)

    def evaluate(self, x):
        return self.function(x)


def _make_registry():
    return {
        "forrester": Benchmark(
            "forrester", 1, forrester, SearchSpace.box([0.0], [1.0]),
            ((FORRESTER_ARGMIN,),), FORRESTER_MIN,
            "1-D, one local and one global minimum",
        ),
        "ackley2": Benchmark(
            "ackley2", 2, ackley, SearchSpace.box([-32.768] * 2, [32.768] * 2),
            ((0.0, 0.0),), 0.0,
            "2-D Ackley, many local minima, global minimum at the origin",
        ),
        "alpine10": Benchmark(
            "alpine10", 10, alpine1, SearchSpace.box([0.0] * 10, [10.0] * 10),
            ((0.0,) * 10,), 0.0,
            "10-D Alpine-1, many local minima, global minimum at the origin",
        ),
        "camel6": Benchmark(
            "camel6", 2, six_hump_camel, SearchSpace.box([-3.0, -2.0], [3.0, 2.0]),
            (CAMEL_ARGMIN, (-CAMEL_ARGMIN[0], -CAMEL_ARGMIN[1])), CAMEL_MIN,
            "2-D six-hump camel, six local minima, two global",
        ),
    }


BENCHMARKS = _make_registry()


def get_benchmark(name):
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; available: {sorted(BENCHMARKS)}") from None
