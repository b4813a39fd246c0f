"""Strang-split solvers for the scaled log-Laplace equation and its linearizations.

All three fields share one time loop and the same heat sub-steps::

    u:  du = (1/2) Lap u - a u^2                    (Riccati step u / (1 + a dt u))
    w:  dw = (1/2) Lap w - a h(t) w                 (exp(-a dt h) with h at the midpoint)
    m:  dm = (1/2) Lap m - a w^2                    (explicit source with w at the midpoint)

where ``a = k^(2-d) rho Gamma^1(kx)`` and ``h = k^kappa S_t phi``. Every
sub-step is order preserving, so ``0 <= w <= u <= m <= h`` holds on the
grid whenever it holds initially.
"""

from __future__ import annotations

import numpy as np

from ..brownian.kernel import heat_multiplier, spectral_step
from ..brownian.testfunctions import TestFunction
from .config import ScalingConfig
from .fields import SpaceTimeField


def _heat(f, mult):
    out = spectral_step(f, mult)
    np.maximum(out, 0.0, out=out)
    return out


def _initial(config: ScalingConfig, phi) -> np.ndarray:
    lat = config.lattice
    f = phi.on_lattice(lat) if isinstance(phi, TestFunction) else np.asarray(phi, dtype=float)
    if f.shape != lat.shape:
        raise ValueError("initial field does not match the lattice")
    if np.any(f < 0):
        raise ValueError("phi must be non-negative")
    return config.amplitude * f


def _record_steps(config: ScalingConfig, record) -> dict[int, float]:
    times = [0.0, config.t] if record is None else sorted(set(float(r) for r in record))
    out = {}
    for r in times:
        n = r / config.dt if config.dt > 0 else 0.0
        j = int(round(n))
        if abs(n - j) > 1e-9 or j < 0 or j > config.steps:
            raise ValueError(f"record time {r} is not on the time grid")
        out[j] = r
    return out


def solve_fields(config: ScalingConfig, medium: np.ndarray, phi, which=("u", "w", "m"),
                 record=None) -> dict[str, SpaceTimeField]:
    """Run the coupled split scheme for the requested subset of ``u, w, m`` (and ``heat``)."""
    lat = config.lattice
    medium = np.asarray(medium, dtype=float)
    if medium.shape != lat.shape:
        raise ValueError("medium raster does not match the lattice")
    if np.any(medium < 0):
        raise ValueError("medium must be non-negative")
    want = set(which) | ({"w"} if "m" in which else set())
    h0 = _initial(config, phi)
    a = config.coupling * medium
    dt = config.dt
    if {"u", "w", "m"} & want:
        config.check_stiffness(float(a.max()) if a.size else 0.0, float(h0.max()) if h0.size else 0.0)
    rec = _record_steps(config, record)
    snaps = {q: [] for q in want | {"heat"}}

    def record_now(j, state):
        if j in rec:
            for q in snaps:
                snaps[q].append(state[q].copy())

    half = heat_multiplier(lat, dt / 2)
    full = heat_multiplier(lat, dt)
    state = {q: h0.copy() for q in snaps}
    record_now(0, state)
    if config.t == 0 or config.rho == 0 or not np.any(a > 0):
        # no reaction: every field is the heat flow
        for j in range(1, config.steps + 1):
            state["heat"] = _heat(state["heat"], full)
            for q in want:
                state[q] = state["heat"]
            record_now(j, state)
        return _pack(config, rec, snaps)
    # h at the first midpoint; fields after the first half step
    hmid = _heat(h0, half)
    cur = {q: _heat(state[q], half) for q in want}
    for j in range(1, config.steps + 1):
        x = a * dt
        if "w" in want:
            decay = np.exp(-0.5 * x * hmid)
            wmid = cur["w"] * decay
            cur["w"] = wmid * decay
        if "m" in want:
            cur["m"] = cur["m"] - x * wmid * wmid
            np.maximum(cur["m"], 0.0, out=cur["m"])
        if "u" in want:
            u = cur["u"]
            cur["u"] = u / (1.0 + x * u)
        last = j == config.steps
        if j in rec or last:
            state = {q: _heat(cur[q], half) for q in want}
            state["heat"] = _heat(hmid, half)
            record_now(j, state)
        if not last:
            cur = {q: _heat(cur[q], full) for q in want}
            hmid = _heat(hmid, full)
    return _pack(config, rec, snaps)


def _pack(config, rec, snaps):
    times = np.array([rec[j] for j in sorted(rec)])
    h = config.digest()
    return {q: SpaceTimeField(q, config.lattice, times, np.stack(v), h) for q, v in snaps.items()}


def solve_scaled_loglaplace(config: ScalingConfig, medium: np.ndarray, phi, record=None) -> SpaceTimeField:
    """``u_k`` with ``u(0) = k^kappa phi``."""
    return solve_fields(config, medium, phi, ("u",), record)["u"]


def solve_linearized(config: ScalingConfig, medium: np.ndarray, phi, record=None):
    """``(w_k, m_k)``; ``m_k`` consumes the ``w_k`` of the same time step."""
    out = solve_fields(config, medium, phi, ("w", "m"), record)
    return out["w"], out["m"]


def heat_flow(config: ScalingConfig, phi, t: float | None = None) -> np.ndarray:
    """``k^kappa S_t phi`` on the config lattice."""
    from ..brownian.kernel import semigroup_apply

    return semigroup_apply(_initial(config, phi), config.t if t is None else t, config.lattice)


def constant_medium_solution(config: ScalingConfig, rho_bar: float, theta: float, t: float):
    """Exact ``(u, w, m)`` for ``Gamma^1 = rho_bar`` and ``phi = theta`` on the torus."""
    u0 = theta * config.amplitude
    A = config.coupling * rho_bar * u0
    u = u0 / (1.0 + A * t)
    w = u0 * np.exp(-A * t)
    m = u0 - 0.5 * u0 * (1.0 - np.exp(-2.0 * A * t))
    return u, w, m
