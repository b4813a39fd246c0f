"""Heat kernel and the heat semigroup on a periodic lattice."""

from __future__ import annotations

import numpy as np
from scipy import fft

from ..lattice import Lattice
from .testfunctions import TestFunction


def heat_kernel(t, x) -> np.ndarray:
    """Transition density ``p_t(x)`` of standard Brownian motion; zero for ``t < 0``.

    ``x`` has trailing axis of length ``d``. ``t`` broadcasts against the
    leading axes of ``x``.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    d = x.shape[-1]
    r2 = np.sum(x * x, axis=-1)
    t, r2 = np.broadcast_arrays(t, r2)
    if np.any((t == 0) & (r2 == 0)):
        raise ValueError("heat kernel is singular at t = 0, x = 0")
    out = np.zeros(t.shape)
    pos = t > 0
    tp = t[pos]
    out[pos] = (2 * np.pi * tp) ** (-d / 2) * np.exp(-r2[pos] / (2 * tp))
    return out if out.ndim else float(out)


def heat_multiplier(lattice: Lattice, t: float) -> np.ndarray:
    """Fourier multiplier ``exp(-|xi|^2 t / 2)`` on the rfft grid."""
    return np.exp(-0.5 * t * lattice.k2)


def semigroup_apply(phi, t: float, lattice: Lattice, workers: int | None = None) -> np.ndarray:
    """``S_t phi`` on the torus ``lattice``; ``phi`` is a TestFunction or a grid field."""
    if t < 0:
        raise ValueError("t must be non-negative")
    f = phi.on_lattice(lattice) if isinstance(phi, TestFunction) else np.asarray(phi, dtype=float)
    if f.shape != lattice.shape:
        raise ValueError(f"field shape {f.shape} does not match lattice {lattice.shape}")
    if t == 0:
        return f.copy()
    return spectral_step(f, heat_multiplier(lattice, t), workers)


def spectral_step(f: np.ndarray, multiplier: np.ndarray, workers: int | None = None) -> np.ndarray:
    fh = fft.rfftn(f, workers=workers)
    fh *= multiplier
    return fft.irfftn(fh, s=f.shape, workers=workers)
