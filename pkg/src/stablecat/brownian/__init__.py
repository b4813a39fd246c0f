"""Heat kernel, semigroup, Brownian path estimators and the energy functional."""

from .energy import INFINITE, en, energy
from .kernel import heat_kernel, semigroup_apply
from .measures import MeasureSpec
from .paths import BrownianPath, hitting_prob, occupation_moment, occupation_times, simulate_path
from .testfunctions import TestFunction, ball_volume

__all__ = [
    "INFINITE", "BrownianPath", "MeasureSpec", "TestFunction", "ball_volume", "en", "energy",
    "heat_kernel", "hitting_prob", "occupation_moment", "occupation_times", "semigroup_apply",
    "simulate_path",
]
