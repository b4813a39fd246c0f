"""Brownian path simulation, small-ball hitting and occupation times.

The estimators walk with an adaptive step: away from the target ball the
step is ``(eta * dist)^2`` so the path cannot jump over the ball unnoticed,
and it never drops below the resolution step ``dt``. A Brownian-bridge
correction on the radial distance catches excursions into the ball between
grid points.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..estimator import EstimatorResult
from ..seeding import child_rng, child_seed
from .testfunctions import ball_volume

BATCH = 4096
ETA = 0.2


@dataclass(frozen=True)
class BrownianPath:
    start: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    seed: int


def simulate_path(start, horizon: float, dt: float, seed: int) -> BrownianPath:
    """Exact Gaussian increments on the grid ``0, dt, 2dt, ..., horizon``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    start = np.atleast_1d(np.asarray(start, dtype=float))
    n = int(math.ceil(horizon / dt - 1e-12)) if horizon > 0 else 0
    times = np.minimum(np.arange(n + 1) * dt, horizon)
    steps = np.diff(times)
    rng = child_rng(seed, 0)
    inc = rng.standard_normal((n, start.size)) * np.sqrt(steps)[:, None]
    pos = np.vstack([start, start + np.cumsum(inc, axis=0)])
    return BrownianPath(start, times, pos, seed)


def simulate_endpoints(start, horizon: float, paths: int, seed: int) -> np.ndarray:
    """Endpoints of ``paths`` independent motions (one exact Gaussian step)."""
    start = np.atleast_1d(np.asarray(start, dtype=float))
    rng = child_rng(seed, 0)
    return start + math.sqrt(horizon) * rng.standard_normal((paths, start.size))


def _batch_seeds(seed: int, paths: int) -> np.ndarray:
    nb = (paths + BATCH - 1) // BATCH
    return np.array([child_seed(seed, b) & 0xFFFFFFFF for b in range(nb)], dtype=np.int64)


# -- hitting -----------------------------------------------------------------

@njit(cache=True)
def _hit_kernel(x0, r, horizon, dt, d, paths, seeds, batch, eta):
    out = np.zeros(paths)
    infinite = not np.isfinite(horizon)
    far = 1e4 * r
    pos = np.empty(d)
    new = np.empty(d)
    for b in range(seeds.size):
        np.random.seed(seeds[b])
        lo = b * batch
        hi = min(paths, lo + batch)
        for p in range(lo, hi):
            for i in range(d):
                pos[i] = x0[i]
            R = math.sqrt(np.sum(pos * pos))
            t = 0.0
            while True:
                if infinite:
                    if R > far:
                        out[p] = (r / R) ** (d - 2)
                        break
                    step = max(dt, (eta * (R - r)) ** 2)
                else:
                    rem = horizon - t
                    if rem <= 0.0 or (R - r) > 8.0 * math.sqrt(rem):
                        break
                    step = min(rem, max(dt, (eta * (R - r)) ** 2))
                s = math.sqrt(step)
                for i in range(d):
                    new[i] = pos[i] + s * np.random.standard_normal()
                R2 = math.sqrt(np.sum(new * new))
                if R2 <= r:
                    out[p] = 1.0
                    break
                if np.random.random() < math.exp(-2.0 * (R - r) * (R2 - r) / step):
                    out[p] = 1.0
                    break
                for i in range(d):
                    pos[i] = new[i]
                R = R2
                t += step
    return out


def hitting_prob(x, z, radius: float, horizon: float, paths: int, dt: float, seed: int = 0) -> EstimatorResult:
    """Monte Carlo ``P_x(tau <= horizon)`` for the closed ball ``B(z, radius)``.

    ``horizon = inf`` needs ``d >= 3``; the walk stops far from the ball and
    is completed with the exact escape probability. The closed form
    ``(radius/|x-z|)^(d-2)`` is attached as ``extra['exact']`` in that case.
    """
    started = time.perf_counter()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    d = x.size
    dist = float(np.linalg.norm(x - z))
    if dist <= radius:
        raise ValueError("start point lies inside the ball")
    extra = {}
    if math.isinf(horizon):
        if d < 3:
            raise ValueError("infinite horizon needs d >= 3")
        extra["exact"] = (radius / dist) ** (d - 2)
    if horizon == 0 or paths == 0:
        return EstimatorResult(0.0, 0.0, paths, seed, time.perf_counter() - started, extra)
    samples = _hit_kernel(x - z, float(radius), float(horizon), float(dt), d, int(paths),
                          _batch_seeds(seed, paths), BATCH, ETA)
    return EstimatorResult.from_samples(samples, seed, started, **extra)


def hitting_limit(x, z, horizon: float) -> float:
    """``c_ba1 * int_0^horizon p_s(z - x) ds``: the limit of ``k^(d-2) P_x(tau_{1/k} <= horizon)``."""
    from scipy import integrate, special

    from ..constants import c_ba1
    from .kernel import heat_kernel

    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(z, dtype=float)) - x
    d = y.size
    if d == 3:
        rr = float(np.linalg.norm(y))
        return float(special.erfc(rr / math.sqrt(2 * horizon)))
    val, _ = integrate.quad(lambda s: heat_kernel(s, y), 0, horizon, limit=200, epsabs=1e-13)
    return c_ba1(d) * val


# -- occupation ----------------------------------------------------------------

@njit(cache=True)
def _occ_kernel(x0, r, levels, dt, d, paths, seeds, batch, eta):
    nl = levels.size
    out = np.zeros((paths, nl))
    pos = np.empty(d)
    new = np.empty(d)
    for b in range(seeds.size):
        np.random.seed(seeds[b])
        lo = b * batch
        hi = min(paths, lo + batch)
        for p in range(lo, hi):
            for i in range(d):
                pos[i] = x0[i]
            R = math.sqrt(np.sum(pos * pos))
            t = 0.0
            acc = 0.0
            lev = 0
            while lev < nl:
                gap = R - r
                step = dt if gap < 3.0 * math.sqrt(dt) else max(dt, (eta * gap) ** 2)
                if t + step >= levels[lev]:
                    step = levels[lev] - t
                if step > 0.0:
                    s = math.sqrt(step)
                    for i in range(d):
                        new[i] = pos[i] + s * np.random.standard_normal()
                    R2 = math.sqrt(np.sum(new * new))
                    a = R - r
                    c = R2 - r
                    if a <= 0.0 and c <= 0.0:
                        acc += step
                    elif a <= 0.0 or c <= 0.0:
                        # linear interpolation of the radial gap locates the crossing
                        inside = -a if a <= 0.0 else -c
                        acc += step * inside / (abs(a) + abs(c))
                    for i in range(d):
                        pos[i] = new[i]
                    R = R2
                    t += step
                while lev < nl and t >= levels[lev]:
                    out[p, lev] = acc
                    lev += 1
    return out


def occupation_times(start, radius: float, horizons, paths: int, dt: float, seed: int = 0) -> np.ndarray:
    """In-ball times ``int_0^M 1{|W_s| <= radius} ds`` for each ``M`` in ``horizons``.

    Returns an array of shape ``(paths, len(horizons))``. All horizons share
    one path per row, so the columns are pathwise non-decreasing.
    """
    horizons = np.atleast_1d(np.asarray(horizons, dtype=float))
    if np.any(horizons <= 0):
        raise ValueError("horizons must be positive")
    start = np.atleast_1d(np.asarray(start, dtype=float))
    if radius <= 0:
        return np.zeros((paths, horizons.size))
    order = np.argsort(horizons)
    occ = _occ_kernel(start, float(radius), horizons[order], float(dt), start.size, int(paths),
                      _batch_seeds(seed, paths), BATCH, ETA)
    out = np.empty_like(occ)
    out[:, order] = occ
    return out


def upta_constant(d: int) -> float:
    """``c`` in ``E int_M^inf 1{|W_s|<=1} ds <= c M^(1-d/2)`` from any start."""
    if d < 3:
        raise ValueError("d >= 3 required")
    return ball_volume(d) * (2 * math.pi) ** (-d / 2) / (d / 2 - 1)


def tail_bound(d: int, horizon: float, power: float = 1.0, radius: float = 1.0) -> float:
    """Bound on the occupation moment lost by stopping at ``horizon`` (Jensen for power < 1)."""
    base = upta_constant(d) * radius ** d * horizon ** (1 - d / 2)
    return base ** power if power <= 1 else math.inf


def occupation_moment(start, radius: float, power: float, horizon: float, paths: int,
                      dt: float, seed: int = 0) -> EstimatorResult:
    """``E_start (int_0^horizon 1{|W_s| <= radius} ds)^power`` with the tail bound attached."""
    started = time.perf_counter()
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    start = np.atleast_1d(np.asarray(start, dtype=float))
    d = start.size
    if d < 3:
        raise ValueError("d >= 3 required")
    bound = tail_bound(d, horizon, power, radius) if radius > 0 else 0.0
    if radius <= 0:
        return EstimatorResult(0.0, 0.0, paths, seed, 0.0, {"tail_bound": 0.0})
    occ = occupation_times(start, radius, [horizon], paths, dt, seed)[:, 0]
    return EstimatorResult.from_samples(occ ** power, seed, started, tail_bound=bound)
