"""Experiment configuration and its flat text-file format.

A config file holds ``key = value`` lines, ``#`` comments, and an optional
``[dimensions]`` section (only needed with an external ``command``)::

    benchmark = forrester
    acquisition = ucb
    budget = 30
    initial_points = 3
    repetitions = 20
    calibrated = both
    splits = loo
    recal = isotonic
    out = results/forrester

    [dimensions]
    # name = lower upper [linear|log] [step=<size>]
    batch_size = 32 512 linear step=32
    learning_rate = 1e-7 0.1 log
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..benchmarks import BENCHMARKS
from ..optimizer import BoConfig
from ..space import Dimension, SearchSpace

METHOD_CHOICES = ("on", "off", "both")
EMIT_CHOICES = ("csv", "json", "both")

_BO_KEYS = {
    "acquisition": str,
    "budget": int,
    "initial_points": int,
    "seed": int,
    "splits": str,
    "recal": str,
    "candidate_count": int,
    "local_count": int,
    "local_scale": float,
    "alpha": float,
    "epsilon_scale": float,
    "loo_max_points": lambda v: None if v.lower() in ("none", "off", "") else int(v),
}
_BOOL = {"true": True, "on": True, "yes": True, "1": True, "false": False, "off": False, "no": False, "0": False}
_BO_KEYS["refine"] = lambda v: _BOOL[v.lower()]
_BO_FIELD = {"splits": "split_strategy", "recal": "recalibrator_mode"}
_TOP_KEYS = {
    "benchmark": str,
    "command": str,
    "timeout": float,
    "repetitions": int,
    "calibrated": str,
    "jobs": int,
    "out": Path,
    "emit": str,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str | None = "forrester"
    command: str | None = None
    space: SearchSpace | None = None
    bo: BoConfig = field(default_factory=BoConfig)
    repetitions: int = 5
    calibrated: str = "both"
    out: Path = Path("results")
    emit: str = "csv"
    jobs: int = 1
    timeout: float = 3600.0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.calibrated not in METHOD_CHOICES:
            raise ConfigError(f"calibrated must be one of {METHOD_CHOICES}")
        if self.emit not in EMIT_CHOICES:
            raise ConfigError(f"emit must be one of {EMIT_CHOICES}")
        if self.command:
            if self.space is None:
                raise ConfigError("an external command needs a [dimensions] section")
        elif self.benchmark not in BENCHMARKS:
            raise ConfigError(
                f"unknown benchmark {self.benchmark!r}; available: {sorted(BENCHMARKS)}"
            )
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def methods(self):
        return {"on": ("calibrated",), "off": ("plain",), "both": ("plain", "calibrated")}[
            self.calibrated
        ]

    @property
    def seeds(self):
        return [self.bo.seed + i for i in range(self.repetitions)]

    def search_space(self):
        if self.space is not None:
            return self.space
        return BENCHMARKS[self.benchmark].space

    def with_overrides(self, **kw):
        """Replace top-level or BoConfig fields; None values are ignored."""
        kw = {k: v for k, v in kw.items() if v is not None}
        bo_kw = {}
        top = {f.name for f in dataclasses.fields(ExperimentConfig)}
        for key in list(kw):
            name = _BO_FIELD.get(key, key)
            if key not in top and name in {f.name for f in dataclasses.fields(BoConfig)}:
                bo_kw[name] = kw.pop(key)
        bo = replace(self.bo, **bo_kw) if bo_kw else self.bo
        return replace(self, bo=bo, **kw)

    def to_dict(self):
        d = {
            "benchmark": None if self.command else self.benchmark,
            "command": self.command,
            "repetitions": self.repetitions,
            "calibrated": self.calibrated,
            "out": str(self.out),
            "emit": self.emit,
            "jobs": self.jobs,
            "timeout": self.timeout,
            "bo": self.bo.to_dict(),
        }
        if self.space is not None:
            d["dimensions"] = [dataclasses.asdict(dim) for dim in self.space.dimensions]
        return d


def parse_dimension(name, text):
    parts = text.split()
    if len(parts) < 2:
        raise ConfigError(f"dimension {name!r}: expected '<lower> <upper> [scale] [step=..]'")
    scale, step = "linear", None
    try:
        lower, upper = float(parts[0]), float(parts[1])
        for token in parts[2:]:
            if token in ("linear", "log"):
                scale = token
            elif token.startswith("step="):
                step = float(token[5:])
            else:
                raise ConfigError(f"dimension {name!r}: unexpected token {token!r}")
        return Dimension(lower, upper, scale, step, name)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"dimension {name!r}: {exc}") from None


def parse_config(text):
    top, bo, dims = {}, {}, []
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section != "dimensions":
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if section == "dimensions":
            dims.append(parse_dimension(key, value))
            continue
        if key not in _TOP_KEYS and key not in _BO_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _TOP_KEYS:
                top[key] = _TOP_KEYS[key](value)
            else:
                bo[_BO_FIELD.get(key, key)] = _BO_KEYS[key](value)
        except (ValueError, KeyError):
            raise ConfigError(f"line {lineno}: bad value {value!r} for {key!r}") from None
    try:
        bo_config = BoConfig(**bo)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "command" in top:
        top.setdefault("benchmark", None)
    return ExperimentConfig(space=SearchSpace(dims) if dims else None, bo=bo_config, **top)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text())
