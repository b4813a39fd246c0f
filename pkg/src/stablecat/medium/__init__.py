"""Sampling, smoothing and validation of the stable catalytic medium."""

from .field import MediumField, field_at, rasterize, window_for
from .io import read_sample, write_sample
from .sampler import (StableMediumSample, c_gamma, default_eps_min, sample_stable_measure,
                      truncation_bias_bound)
from .validation import ScalingReport, empirical_loglaplace, scaling_check, weighted_identity

__all__ = [
    "MediumField", "ScalingReport", "StableMediumSample", "c_gamma", "default_eps_min",
    "empirical_loglaplace", "field_at", "rasterize", "read_sample", "sample_stable_measure",
    "scaling_check", "truncation_bias_bound", "weighted_identity", "window_for", "write_sample",
]
