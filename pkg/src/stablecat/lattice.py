"""Periodic lattices used by the spectral solvers and rasters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Lattice:
    """Uniform periodic lattice on the box ``[origin, origin + side)^d``.

    Grid points sit at ``origin + j * spacing``; each point is the center of
    its cell. With the default ``origin = -side / 2`` and even ``n`` the
    origin of space is a grid point, and refining ``n -> 2n`` keeps every old
    point.
    """

    d: int
    n: int
    side: float
    origin: float | None = None

    def __post_init__(self):
        if self.d < 1 or self.n < 1 or self.side <= 0:
            raise ValueError("degenerate lattice")
        if self.origin is None:
            object.__setattr__(self, "origin", -self.side / 2.0)

    @property
    def spacing(self) -> float:
        return self.side / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.d

    @property
    def lo(self) -> np.ndarray:
        return np.full(self.d, self.origin)

    @property
    def hi(self) -> np.ndarray:
        return np.full(self.d, self.origin + self.side)

    @cached_property
    def axis(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n)

    def points(self) -> np.ndarray:
        """All grid points, shape ``shape + (d,)``."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1)

    def radius(self) -> np.ndarray:
        """Distance of each grid point from the origin of space."""
        r2 = np.zeros(self.shape)
        for i in range(self.d):
            sl = [None] * self.d
            sl[i] = slice(None)
            r2 = r2 + (self.axis ** 2)[tuple(sl)]
        return np.sqrt(r2)

    @cached_property
    def k2(self) -> np.ndarray:
        """|xi|^2 on the rfft frequency grid."""
        full = 2 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        half = 2 * np.pi * np.fft.rfftfreq(self.n, d=self.spacing)
        out = np.zeros(self.shape[:-1] + (half.size,))
        for i in range(self.d):
            f = half if i == self.d - 1 else full
            sl = [None] * self.d
            sl[i] = slice(None)
            out = out + (f ** 2)[tuple(sl)]
        return out

    def refine(self, factor: int = 2) -> "Lattice":
        return Lattice(self.d, self.n * factor, self.side, self.origin)

    def interpolate(self, values: np.ndarray, x) -> np.ndarray:
        """Periodic multilinear interpolation of a grid field at points ``x``."""
        from scipy.ndimage import map_coordinates

        x = np.asarray(x, dtype=float)
        coords = ((x - self.origin) / self.spacing).reshape(-1, self.d).T
        out = map_coordinates(values, coords, order=1, mode="grid-wrap")
        return out.reshape(x.shape[:-1])

    def nearest_index(self, x) -> np.ndarray:
        """Flat index of the grid point nearest to each of ``x`` (periodic)."""
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        j = np.rint((x - self.origin) / self.spacing).astype(np.int64) % self.n
        return np.ravel_multi_index(tuple(j.T), self.shape)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values) * self.cell_volume)

    def max_spacing_for(self, k: float) -> bool:
        """Raster-resolution constraint: spacing <= 1/(4k)."""
        return self.spacing <= 1.0 / (4.0 * k) * (1 + 1e-12)

    @staticmethod
    def for_scale(d: int, side: float, k: float, *, fft_friendly: bool = True) -> "Lattice":
        """Smallest lattice of the given side whose spacing resolves radius 1/k."""
        n = math.ceil(4.0 * k * side - 1e-9)
        if fft_friendly:
            n = _next_fast_even(n)
        return Lattice(d, n, side)


def _next_fast_even(n: int) -> int:
    from scipy.fft import next_fast_len

    m = next_fast_len(max(n, 2), real=True)
    while m % 2:
        m = next_fast_len(m + 1, real=True)
    return m
