"""Asymptotic upper and lower bounds for multi-time Laplace transforms of the fluctuations."""

from __future__ import annotations

import math

from ..constants import LimitConstants
from ..lattice import Lattice
from ..pde.limit import NODES, fluctuation_functional


def _pair_of_constants(constants) -> tuple[float, float]:
    if isinstance(constants, LimitConstants):
        return constants.c_bar.value, constants.c_under.value
    c_bar, c_under = constants
    return float(c_bar), float(c_under)


def evaluate_multitime_bounds(mu, schedule, gamma: float, constants, lattice: Lattice,
                              nodes: int = NODES) -> tuple[float, float]:
    """``(exp F(c_bar), exp F(c_under))`` for ``schedule = [(t_1, phi_1), ...]``.

    ``constants`` is a ``LimitConstants`` or a pair ``(c_bar, c_under)``.
    """
    schedule = list(schedule)
    if not schedule:
        return 1.0, 1.0
    c_bar, c_under = _pair_of_constants(constants)
    f1 = fluctuation_functional(mu, schedule, 1.0, gamma, lattice, nodes)
    return math.exp(c_bar * f1), math.exp(c_under * f1)
