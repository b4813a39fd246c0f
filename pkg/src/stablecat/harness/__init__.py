"""Experiment orchestration: sweeps over k, trend checks, persistence and the CLI."""

from .annealed import annealed_w_gap
from .bounds import evaluate_multitime_bounds
from .config import ExperimentConfig, load, persist
from .lln import LLNReport, run_lln
from .sweep import SweepReport, SweepRow, run_fluctuation_sweep
from .variance import ThresholdReport, quenched_variance, threshold_study

__all__ = [
    "ExperimentConfig", "LLNReport", "SweepReport", "SweepRow", "ThresholdReport", "annealed_w_gap",
    "evaluate_multitime_bounds", "load", "persist", "quenched_variance", "run_fluctuation_sweep", "run_lln",
    "threshold_study",
]
