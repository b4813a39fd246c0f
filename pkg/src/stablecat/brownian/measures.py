"""Initial measures: Lebesgue on a box, a density on a lattice, or finitely many atoms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lattice import Lattice

KINDS = ("lebesgue", "grid", "atoms")


@dataclass(frozen=True)
class MeasureSpec:
    kind: str
    d: int
    lo: tuple = ()
    hi: tuple = ()
    scale: float = 1.0
    lattice: Lattice | None = None
    density: np.ndarray | None = None
    points: np.ndarray | None = None
    masses: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "grid":
            if self.density is None or self.lattice is None or self.density.shape != self.lattice.shape:
                raise ValueError("grid measure needs a density matching its lattice")
            if np.any(self.density < 0):
                raise ValueError("density must be non-negative")
        if self.kind == "atoms":
            if self.points is None or self.points.shape != (len(self.masses), self.d):
                raise ValueError("atom list shape mismatch")
            if np.any(self.masses < 0):
                raise ValueError("atom masses must be non-negative")
        if self.scale < 0:
            raise ValueError("scale must be non-negative")

    # constructors
    @classmethod
    def lebesgue(cls, lo, hi, scale: float = 1.0):
        lo = tuple(float(v) for v in np.atleast_1d(lo))
        hi = tuple(float(v) for v in np.atleast_1d(hi))
        return cls("lebesgue", len(lo), lo=lo, hi=hi, scale=float(scale))

    @classmethod
    def on_grid(cls, lattice: Lattice, density):
        density = np.asarray(density, dtype=float)
        density.setflags(write=False)
        return cls("grid", lattice.d, lattice=lattice, density=density)

    @classmethod
    def from_function(cls, lattice: Lattice, f):
        """Density ``f`` (a callable on points) sampled on ``lattice``."""
        return cls.on_grid(lattice, f(lattice.points()))

    @classmethod
    def atoms(cls, points, masses):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        masses = np.atleast_1d(np.asarray(masses, dtype=float))
        return cls("atoms", points.shape[1], points=points, masses=masses)

    @classmethod
    def zero(cls, d: int):
        return cls.atoms(np.zeros((0, d)), np.zeros(0))

    @property
    def is_atomic(self) -> bool:
        return self.kind == "atoms" and bool(np.any(self.masses > 0))

    @property
    def total_mass(self) -> float:
        if self.kind == "lebesgue":
            return self.scale * float(np.prod(np.subtract(self.hi, self.lo)))
        if self.kind == "grid":
            return self.lattice.integrate(self.density)
        return float(np.sum(self.masses))

    def density_on(self, lattice: Lattice) -> np.ndarray:
        """Density of an absolutely continuous measure on ``lattice``."""
        if self.kind == "atoms":
            raise ValueError("atomic measure has no density")
        if self.kind == "grid":
            if self.lattice != lattice:
                return self.lattice.interpolate(self.density, lattice.points())
            return np.asarray(self.density)
        x = lattice.points()
        inside = np.all((x >= np.array(self.lo)) & (x < np.array(self.hi)), axis=-1)
        return self.scale * inside.astype(float)

    def pair(self, f, lattice: Lattice | None = None) -> float:
        """``<mu, f>`` for a grid field on ``lattice`` or a callable on points."""
        if callable(f):
            if self.kind == "atoms":
                return float(np.dot(self.masses, f(self.points))) if len(self.masses) else 0.0
            lat = lattice or self.lattice
            if lat is None:
                raise ValueError("a lattice is needed to integrate a callable")
            return lat.integrate(self.density_on(lat) * f(lat.points()))
        f = np.asarray(f, dtype=float)
        if lattice is None:
            raise ValueError("grid field needs its lattice")
        if self.kind == "atoms":
            if not len(self.masses):
                return 0.0
            return float(np.dot(self.masses, lattice.interpolate(f, self.points)))
        return lattice.integrate(self.density_on(lattice) * f)

    def poisson_points(self, intensity: float, rng: np.random.Generator) -> np.ndarray:
        """Points of a Poisson process with intensity ``intensity * mu``."""
        if self.kind == "atoms":
            counts = rng.poisson(intensity * self.masses)
            return np.repeat(self.points, counts, axis=0)
        if self.kind == "lebesgue":
            n = rng.poisson(intensity * self.total_mass)
            return np.asarray(self.lo) + rng.random((n, self.d)) * np.subtract(self.hi, self.lo)
        lat = self.lattice
        counts = rng.poisson(intensity * self.density.ravel() * lat.cell_volume)
        idx = np.repeat(np.arange(counts.size), counts)
        centers = lat.axis[np.stack(np.unravel_index(idx, lat.shape), axis=-1)]
        jitter = (rng.random(centers.shape) - 0.5) * lat.spacing
        return centers + jitter

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` i.i.d. points from the normalized measure."""
        if self.total_mass <= 0:
            raise ValueError("cannot sample from the zero measure")
        if self.kind == "atoms":
            idx = rng.choice(len(self.masses), size=n, p=self.masses / self.masses.sum())
            return self.points[idx]
        if self.kind == "lebesgue":
            return np.asarray(self.lo) + rng.random((n, self.d)) * np.subtract(self.hi, self.lo)
        lat = self.lattice
        p = self.density.ravel() / self.density.sum()
        idx = rng.choice(p.size, size=n, p=p)
        centers = lat.axis[np.stack(np.unravel_index(idx, lat.shape), axis=-1)]
        return centers + (rng.random(centers.shape) - 0.5) * lat.spacing
