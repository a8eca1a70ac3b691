"""Membrane-parallel Monkey Algorithm with a logical-clock cost model."""
from .clock import DEFAULT_MODEL, LogicalClock, TickModel, ma_ticks, pmsam_ticks
from .errors import ConfigurationError, ContractViolation
from .harness import ExperimentSpec, SummaryRow, compare_time, run_experiment
from .membrane import PmsamConfig, run_pmsam
from .monkey import MaParams, MonkeyState, run_ma
from .objective import ObjectiveDescriptor, Sense, builtin_suite, evaluate, get_objective
from .report import RunReport

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "ConfigurationError",
    "ContractViolation",
    "ExperimentSpec",
    "LogicalClock",
    "MaParams",
    "MonkeyState",
    "ObjectiveDescriptor",
    "PmsamConfig",
    "RunReport",
    "Sense",
    "SummaryRow",
    "TickModel",
    "builtin_suite",
    "compare_time",
    "evaluate",
    "get_objective",
    "ma_ticks",
    "pmsam_ticks",
    "run_experiment",
    "run_ma",
    "run_pmsam",
]
