"""Experiment orchestration, reports and stream testing."""

from .experiment import (
    ExperimentSpec,
    Scenario,
    load_experiment_spec,
    run_experiment,
    run_experiment_async,
    run_trial,
)
from .metrics import MetricsRow, MetricsTable, TrialResult, aggregate
from .report import ReportFormat, emit_report, parse_report
from .stream_test import SamplerSpec, StreamTestResult, test_stream

__all__ = [
    "ExperimentSpec",
    "MetricsRow",
    "MetricsTable",
    "ReportFormat",
    "SamplerSpec",
    "Scenario",
    "StreamTestResult",
    "TrialResult",
    "aggregate",
    "emit_report",
    "load_experiment_spec",
    "parse_report",
    "run_experiment",
    "run_experiment_async",
    "run_trial",
    "test_stream",
]
