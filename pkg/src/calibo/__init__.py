"""Bayesian optimization with cross-validated quantile recalibration."""

from .acquisition import (
    AcquisitionSpec,
    acquisition_value,
    confidence_bound,
    expected_improvement,
    prob_improvement,
)
from .benchmarks import BENCHMARKS, Benchmark, get_benchmark
from .calibration import (
    CalibrationReport,
    RecalibratedForecast,
    Recalibrator,
    RecalPair,
    apply_recalibrator,
    build_recal_dataset,
    calibrate,
    calibration_score,
    create_splits,
    empirical_level,
    fit_recalibrator,
    proposition1_check,
)
from .exceptions import (
    CaliboError,
    DomainError,
    InvalidDatasetError,
    InvalidInputError,
    ObjectiveError,
    TooFewObservationsError,
)
from .optimizer import BoConfig, RunTrace, initial_design, run, run_calibrated, run_plain
from .space import Dimension, SearchSpace
from .surrogate import Dataset, GaussianForecast, GaussianProcess, GpModel, Kernel, fit, predict

__version__ = "0.1.0"
