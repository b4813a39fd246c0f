"""The smoothed catalyst ``Gamma^1(y) = Gamma(B(y, 1))`` and its hydrodynamic view ``x -> Gamma^1(kx)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..brownian.testfunctions import ball_volume
from ..lattice import Lattice
from .sampler import StableMediumSample


@njit(cache=True)
def _bucket_keys(loc, lo, dims):
    n, d = loc.shape
    keys = np.empty(n, np.int64)
    for i in range(n):
        key = 0
        for j in range(d):
            b = int(math.floor(loc[i, j] - lo[j]))
            b = min(max(b, 0), dims[j] - 1)
            key = key * dims[j] + b
        keys[i] = key
    return keys


@njit(cache=True)
def _query(y, loc, w, starts, lo, dims):
    # sum of weights within closed distance 1 of each row of y
    m, d = y.shape
    out = np.zeros(m)
    nb = 1
    for j in range(d):
        nb *= 3
    cell = np.empty(d, np.int64)
    for q in range(m):
        for j in range(d):
            cell[j] = int(math.floor(y[q, j] - lo[j]))
        s = 0.0
        for code in range(nb):
            c = code
            key = 0
            ok = True
            for j in range(d - 1, -1, -1):
                off = c % 3 - 1
                c //= 3
                b = cell[j] + off
                if b < 0 or b >= dims[j]:
                    ok = False
                    break
            if not ok:
                continue
            c = code
            mult = 1
            for j in range(d - 1, -1, -1):
                b = cell[j] + c % 3 - 1
                c //= 3
                key += b * mult
                mult *= dims[j]
            for i in range(starts[key], starts[key + 1]):
                r2 = 0.0
                for j in range(d):
                    t = y[q, j] - loc[i, j]
                    r2 += t * t
                if r2 <= 1.0:
                    s += w[i]
        out[q] = s
    return out


@njit(cache=True)
def _raster(loc, w, k, origin, h, n, d):
    # stencil per atom over the lattice points x_j = origin + j h with |k x_j - z| <= 1
    size = 1
    for _ in range(d):
        size *= n
    out = np.zeros(size)
    jlo = np.empty(d, np.int64)
    jhi = np.empty(d, np.int64)
    idx = np.empty(d, np.int64)
    last = d - 1
    for a in range(loc.shape[0]):
        empty = False
        for j in range(d):
            c = loc[a, j] / k
            jlo[j] = max(0, int(math.floor((c - 1.0 / k - origin) / h)) - 1)
            jhi[j] = min(n - 1, int(math.ceil((c + 1.0 / k - origin) / h)) + 1)
            if jlo[j] > jhi[j]:
                empty = True
        if empty:
            continue
        for j in range(last):
            idx[j] = jlo[j]
        while True:
            r2 = 0.0
            base = 0
            for j in range(last):
                t = k * (origin + h * idx[j]) - loc[a, j]
                r2 += t * t
                base = base * n + idx[j]
            if r2 <= 1.0:
                # the exact test below decides; the span only prunes the scan
                half = math.sqrt(1.0 - r2) / k
                c = loc[a, last] / k
                lo = max(jlo[last], int(math.floor((c - half - origin) / h)) - 1)
                hi = min(jhi[last], int(math.ceil((c + half - origin) / h)) + 1)
                for i in range(lo, hi + 1):
                    t = k * (origin + h * i) - loc[a, last]
                    if r2 + t * t <= 1.0:
                        out[base * n + i] += w[a]
            j = last - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] <= jhi[j]:
                    break
                idx[j] = jlo[j]
                j -= 1
            if j < 0:
                break
    return out


@dataclass(frozen=True)
class MediumField:
    """``x -> Gamma^1(k x)`` for one sampled medium.

    The sample must carry a pad of at least 1 so that every unit ball
    centered in the window lies inside the sampled region.
    """

    sample: StableMediumSample
    k: float = 1.0
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.sample.pad < 1.0:
            raise ValueError("smoothing needs a sampling pad of at least 1")

    @property
    def d(self) -> int:
        return self.sample.d

    @property
    def drift_value(self) -> float:
        return self.sample.drift * ball_volume(self.d)

    def _built(self):
        if not self._index:
            s = self.sample
            lo = s.region_lo
            dims = np.maximum(1, np.ceil(s.region_hi - lo).astype(np.int64))
            keys = _bucket_keys(np.ascontiguousarray(s.locations), lo, dims) if len(s) else np.zeros(0, np.int64)
            order = np.argsort(keys, kind="stable")
            starts = np.searchsorted(keys[order], np.arange(int(np.prod(dims)) + 1))
            self._index.update(loc=np.ascontiguousarray(s.locations[order]), w=s.weights[order],
                               starts=starts.astype(np.int64), lo=lo, dims=dims)
        return self._index

    def catalyst(self, y) -> np.ndarray:
        """``Gamma^1`` at catalyst coordinates ``y`` (no k-scaling)."""
        y = np.asarray(y, dtype=float)
        flat = np.ascontiguousarray(y.reshape(-1, self.d))
        s = self.sample
        if np.any(flat < np.asarray(s.lo) - 1e-12) or np.any(flat > np.asarray(s.hi) + 1e-12):
            raise ValueError("query point outside the sampled window")
        ix = self._built()
        vals = _query(flat, ix["loc"], ix["w"], ix["starts"], ix["lo"], ix["dims"]) if len(s) else np.zeros(len(flat))
        return (vals + self.drift_value).reshape(y.shape[:-1])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.catalyst(self.k * x)


def field_at(fld: MediumField, x) -> float | np.ndarray:
    """``Gamma^1(k x)``; exact sum over atoms within closed distance 1 of ``k x``."""
    out = fld(x)
    return float(out) if np.ndim(out) == 0 else out


def rasterize(fld: MediumField, lattice: Lattice) -> np.ndarray:
    """``Gamma^1(k x)`` at every lattice point."""
    s = fld.sample
    if lattice.d != s.d:
        raise ValueError("dimension mismatch")
    k = fld.k
    top = lattice.origin + lattice.spacing * (lattice.n - 1)
    if np.any(k * lattice.origin < np.asarray(s.lo) - 1e-9) or np.any(k * top > np.asarray(s.hi) + 1e-9):
        raise ValueError("lattice not covered by the sampled window")
    if len(s) == 0:
        return np.full(lattice.shape, fld.drift_value)
    ix = fld._built()  # bucket order keeps the scatter cache-friendly
    flat = _raster(ix["loc"], ix["w"], float(k), float(lattice.origin),
                   float(lattice.spacing), lattice.n, lattice.d)
    return flat.reshape(lattice.shape) + fld.drift_value


def window_for(lattice: Lattice, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Catalyst-coordinate window seen by a lattice at scale ``k``."""
    lo = np.full(lattice.d, k * lattice.origin)
    hi = np.full(lattice.d, k * (lattice.origin + lattice.side))
    return lo, hi
