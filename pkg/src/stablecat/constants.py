"""The fluctuation constants ``c_bar``, ``c_under`` and the small-ball constant ``c_ba1``.

``c_bar = rho^g * c_ba1(d) * E_i (T_1)^g`` with ``T_1`` the total time a
motion started on the unit sphere spends in the unit ball.
``c_under = g * rho^g * |B(0,1)| * E (T_2 + T_2')^(g-1)`` with ``T_2, T_2'``
the times two independent motions started at 0 spend in ``B(0, 2)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .brownian.paths import occupation_times, tail_bound
from .brownian.testfunctions import ball_volume
from .estimator import EstimatorResult, combined_se

DEFAULT_DT = 2e-3


def c_ba1(d: int) -> float:
    """``(d-2) pi^(d/2) / G(d/2)``: 2 pi, 2 pi^2, 4 pi^2 for d = 3, 4, 5."""
    if d < 3:
        raise ValueError("d >= 3 required")
    return (d - 2) * math.pi ** (d / 2) / math.gamma(d / 2)


def cunder_prefactor(d: int) -> float:
    """``2 pi^(d/2) / (d G(d/2))``, the volume of the unit ball."""
    return 2 * math.pi ** (d / 2) / (d * math.gamma(d / 2))


def _check_regime(d, gamma, rho, allow_unit=False):
    top = 1.0 if allow_unit else 1.0 - 1e-15
    if not (0 < gamma <= top):
        raise ValueError("gamma must lie in (0, 1)")
    if d * gamma <= 2:
        raise ValueError("subcritical: need d > 2/gamma")
    if rho < 0:
        raise ValueError("rho must be non-negative")


def unit_sphere_point(d: int, direction: int = 0) -> np.ndarray:
    """A point on the unit sphere; ``direction`` picks a coordinate axis or a diagonal."""
    if direction < d:
        e = np.zeros(d)
        e[direction] = 1.0
        return e
    return np.ones(d) / math.sqrt(d)


def estimate_cbar(d: int, gamma: float, rho: float, paths: int, horizon: float,
                  dt: float = DEFAULT_DT, seed: int = 0, start=None, tol: float | None = None) -> EstimatorResult:
    """Monte Carlo ``c_bar``. ``gamma = 1`` is accepted as an estimator diagnostic.

    Truncating at ``horizon`` biases the estimate down; the bound on the
    missing part is reported as ``extra['tail_bound']``.
    """
    _check_regime(d, gamma, rho, allow_unit=True)
    started = time.perf_counter()
    pref = rho ** gamma * c_ba1(d)
    bound = pref * tail_bound(d, horizon, gamma)
    if tol is not None and bound > tol:
        raise ValueError(f"horizon {horizon} too small: tail bound {bound:.3g} exceeds {tol:.3g}")
    if rho == 0:
        return EstimatorResult(0.0, 0.0, paths, seed, 0.0, {"tail_bound": 0.0, "bias": "down"})
    x0 = unit_sphere_point(d) if start is None else np.asarray(start, dtype=float)
    if not math.isclose(float(np.linalg.norm(x0)), 1.0, rel_tol=1e-9):
        raise ValueError("start must lie on the unit sphere")
    occ = occupation_times(x0, 1.0, [horizon], paths, dt, seed)[:, 0]
    return EstimatorResult.from_samples(pref * occ ** gamma, seed, started, tail_bound=bound,
                                        bias="down", horizon=horizon)


def estimate_cunder(d: int, gamma: float, rho: float, paths: int, horizon: float,
                    dt: float = DEFAULT_DT, seed: int = 0) -> EstimatorResult:
    """Monte Carlo ``c_under`` over ``paths`` pairs of motions started at 0.

    The negative power ``gamma - 1`` makes truncation bias the estimate up.
    Sojourns are floored at one resolution step ``dt``.
    """
    _check_regime(d, gamma, rho)
    started = time.perf_counter()
    if rho == 0:
        return EstimatorResult(0.0, 0.0, paths, seed, 0.0, {"bias": "up"})
    occ = occupation_times(np.zeros(d), 2.0, [horizon], 2 * paths, dt, seed)[:, 0]
    total = np.maximum(occ[0::2] + occ[1::2], dt)
    pref = gamma * rho ** gamma * cunder_prefactor(d)
    return EstimatorResult.from_samples(pref * total ** (gamma - 1), seed, started, bias="up",
                                        horizon=horizon)


def c_replace2(M, d: int, gamma: float, paths: int, dt: float = DEFAULT_DT, seed: int = 0):
    """``E_i (int_0^M 1{|W_s|<=1} ds)^gamma`` from a unit-sphere start.

    ``M`` may be a sequence; all horizons then share the same paths, which
    makes the estimates pathwise monotone in ``M``.
    """
    levels = np.atleast_1d(np.asarray(M, dtype=float))
    started = time.perf_counter()
    pos = levels > 0
    occ = np.zeros((paths, levels.size))
    if pos.any():
        occ[:, pos] = occupation_times(unit_sphere_point(d), 1.0, levels[pos], paths, dt, seed)
    out = []
    for i, m in enumerate(levels):
        if m <= 0:
            out.append(EstimatorResult(0.0, 0.0, paths, seed, 0.0, {"M": float(m)}))
        else:
            out.append(EstimatorResult.from_samples(occ[:, i] ** gamma, seed, started, M=float(m)))
    return out if np.ndim(M) else out[0]


@dataclass(frozen=True)
class LimitConstants:
    d: int
    gamma: float
    rho: float
    c_bar: EstimatorResult
    c_under: EstimatorResult
    c_ba1: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def separation(self) -> float:
        """``(c_bar - c_under)`` in units of the combined standard error."""
        se = combined_se(self.c_bar, self.c_under)
        return (self.c_bar.value - self.c_under.value) / se if se > 0 else math.inf


def estimate_constants(d: int, gamma: float, rho: float = 1.0, paths: int = 20000,
                       horizon: float = 2e4, horizon_under: float | None = None,
                       dt: float = DEFAULT_DT, seed: int = 0) -> LimitConstants:
    cb = estimate_cbar(d, gamma, rho, paths, horizon, dt, seed)
    cu = estimate_cunder(d, gamma, rho, paths, horizon_under or horizon, dt, seed + 1)
    return LimitConstants(d, gamma, rho, cb, cu, c_ba1(d),
                          {"horizon": horizon, "dt": dt, "tail_bound": cb.extra["tail_bound"],
                           "unit_ball_volume": ball_volume(d)})
