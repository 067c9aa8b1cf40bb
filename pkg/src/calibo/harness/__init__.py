"""Experiment harness: configs, repeated paired runs, file output, CLI."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiment import AggregateResult, ExperimentResult, aggregate, run_experiment
from .external import ExternalObjective, external_objective
from .io import AGGREGATE_COLUMNS, read_csv, trace_columns, write_aggregate_csv, write_trace_csv
