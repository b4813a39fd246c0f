"""Mild solutions of the limit equation and the multi-time fluctuation functional.

``v(t) = c int_0^t S_r((S_{t-r} phi)^(1+gamma)) dr`` solves
``dv = (1/2) Lap v + c (S_t phi)^(1+gamma)`` with ``v(0) = 0``. The time
integral uses composite Simpson; every semigroup action is a Fourier
multiplier, so each node costs two transforms.
"""

from __future__ import annotations

import numpy as np
from scipy import fft

from ..brownian.testfunctions import TestFunction
from ..lattice import Lattice
from .fields import SpaceTimeField

NODES = 64


def simpson_weights(a: float, b: float, intervals: int = NODES) -> tuple[np.ndarray, np.ndarray]:
    if intervals % 2:
        intervals += 1
    r = np.linspace(a, b, intervals + 1)
    w = np.ones(intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return r, w * (b - a) / (3.0 * intervals)


def _grid(phi, lattice):
    return phi.on_lattice(lattice) if isinstance(phi, TestFunction) else np.asarray(phi, dtype=float)


def solve_limit_mild(c: float, phi, t: float, gamma: float, lattice: Lattice,
                     nodes: int = NODES) -> SpaceTimeField:
    """``v(t)`` on the torus ``lattice``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    shape = lattice.shape
    if c == 0 or t == 0:
        return SpaceTimeField("v", lattice, np.array([t]), np.zeros((1,) + shape))
    phat = fft.rfftn(_grid(phi, lattice))
    k2 = lattice.k2
    acc = np.zeros_like(phat)
    r, w = simpson_weights(0.0, t, nodes)
    for ri, wi in zip(r, w):
        inner = fft.irfftn(phat * np.exp(-0.5 * (t - ri) * k2), s=shape)
        np.maximum(inner, 0.0, out=inner)
        acc += wi * np.exp(-0.5 * ri * k2) * fft.rfftn(inner ** (1.0 + gamma))
    v = c * fft.irfftn(acc, s=shape)
    return SpaceTimeField("v", lattice, np.array([t]), v[None])


def limit_residual(c: float, phi, t: float, gamma: float, lattice: Lattice, h: float = 1e-3,
                   nodes: int = NODES) -> np.ndarray:
    """``dv/dt - (1/2) Lap v - c (S_t phi)^(1+gamma)`` by central differences in time."""
    vp = solve_limit_mild(c, phi, t + h, gamma, lattice, nodes).final
    vm = solve_limit_mild(c, phi, t - h, gamma, lattice, nodes).final
    v0 = solve_limit_mild(c, phi, t, gamma, lattice, nodes).final
    lap = fft.irfftn(-lattice.k2 * fft.rfftn(v0), s=lattice.shape)
    st = fft.irfftn(fft.rfftn(_grid(phi, lattice)) * np.exp(-0.5 * t * lattice.k2), s=lattice.shape)
    return (vp - vm) / (2 * h) - 0.5 * lap - c * np.maximum(st, 0.0) ** (1.0 + gamma)


def fluctuation_functional(mu, schedule, c: float, gamma: float, lattice: Lattice,
                           nodes: int = NODES) -> float:
    """``c <mu, sum_i int_{t_{i-1}}^{t_i} S_r((sum_{j>=i} S_{t_j - r} phi_j)^(1+gamma)) dr>`` with ``t_0 = 0``."""
    times = [float(t) for t, _ in schedule]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ValueError("schedule must be sorted with non-negative times")
    if c == 0 or not schedule:
        return 0.0
    shape = lattice.shape
    k2 = lattice.k2
    phats = [fft.rfftn(_grid(phi, lattice)) for _, phi in schedule]
    total = 0.0
    prev = 0.0
    for i, ti in enumerate(times):
        if ti > prev:
            r, w = simpson_weights(prev, ti, nodes)
            for rj, wj in zip(r, w):
                spec = sum(ph * np.exp(-0.5 * (tj - rj) * k2) for tj, ph in zip(times[i:], phats[i:]))
                inner = np.maximum(fft.irfftn(spec, s=shape), 0.0) ** (1.0 + gamma)
                g = fft.irfftn(fft.rfftn(inner) * np.exp(-0.5 * rj * k2), s=shape)
                total += wj * mu.pair(g, lattice)
        prev = ti
    return c * total
