"""The energy functional ``En_lam(mu) = int int mu(dx) phi_lam(x) mu(dy) phi_lam(y) en(x - y)``."""

from __future__ import annotations

import math

import numpy as np
from scipy import signal

from .measures import MeasureSpec

INFINITE = math.inf


def en(x) -> np.ndarray:
    """``log+(1/|x|)`` in d=4, ``|x|^(4-d)`` in d>=5 and the constant 1 in d=3."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    r = np.sqrt(np.sum(x * x, axis=-1))
    if d == 3:
        return np.ones_like(r)
    with np.errstate(divide="ignore"):
        if d == 4:
            return np.maximum(0.0, -np.log(r))
        return r ** (4.0 - d)


def _cell_average_at_zero(d: int, h: float, m: int = 8) -> float:
    # mean of en over the cube [-h/2, h/2]^d by a midpoint rule that avoids 0
    g = (np.arange(m) + 0.5) / m - 0.5
    pts = np.stack(np.meshgrid(*([g * h] * d), indexing="ij"), axis=-1)
    return float(np.mean(en(pts)))


def energy(mu: MeasureSpec, lam: float, n: int | None = None) -> float:
    """``En_lam(mu)`` or ``INFINITE``.

    Absolutely continuous measures are discretized on their own lattice
    (grid kind) or on ``n`` midpoint cells per axis (Lebesgue kind); the
    kernel is applied by zero-padded FFT convolution with the zero offset
    replaced by the kernel's cell average.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    d = mu.d
    if d < 3:
        raise ValueError("d >= 3 required")
    if mu.kind == "atoms":
        w = mu.masses * np.exp(-lam * np.linalg.norm(mu.points, axis=1)) if len(mu.masses) else np.zeros(0)
        if not np.any(w > 0):
            return 0.0
        if d > 3:
            return INFINITE
        return float(np.sum(w)) ** 2
    if mu.kind == "grid":
        lat = mu.lattice
        h = lat.spacing
        axes = [lat.axis] * d
        dens = np.asarray(mu.density)
    else:
        n = n or {3: 32, 4: 20}.get(d, 10)
        h_axes = [(b - a) / n for a, b in zip(mu.lo, mu.hi)]
        if not np.allclose(h_axes, h_axes[0]):
            raise ValueError("Lebesgue box must be a cube")
        h = h_axes[0]
        if h == 0:
            return 0.0
        axes = [a + h * (np.arange(n) + 0.5) for a in mu.lo]
        dens = np.full((n,) * d, mu.scale)
    mesh = np.meshgrid(*axes, indexing="ij")
    r = np.sqrt(sum(m * m for m in mesh))
    f = dens * np.exp(-lam * r) * h ** d
    if not np.any(f > 0):
        return 0.0
    if d == 3:
        return float(np.sum(f)) ** 2
    m = f.shape[0]
    off = h * np.arange(-(m - 1), m)
    kmesh = np.stack(np.meshgrid(*([off] * d), indexing="ij"), axis=-1)
    kern = en(kmesh)
    kern[(m - 1,) * d] = _cell_average_at_zero(d, h)
    conv = signal.fftconvolve(f, kern, mode="same")
    return float(np.sum(f * conv))
