"""Branching Brownian particles approximating the catalytic super-Brownian motion.

Each particle carries mass ``eps``. Over a step ``dt`` it branches with the
exact offspring law of critical binary branching at the frozen rate
``r = 2 rho Gamma^1(x) / eps``, then every offspring moves by an independent
Gaussian increment. With the rate ``2 rho Gamma^1 / eps`` the log-Laplace
nonlinearity is exactly ``rho Gamma^1 u^2``; with a Poisson initial state
of intensity ``mu / eps``

    E exp(-<X_t, phi>) = exp(-<mu, u(t)>),  u(0) = (1 - exp(-eps phi)) / eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .brownian.measures import MeasureSpec
from .lattice import Lattice
from .seeding import child_rng, child_seed

RATE_CALIBRATION = 2.0


class PopulationExplosion(RuntimeError):
    pass


@dataclass(frozen=True)
class ReactantConfig:
    """``rho`` multiplies the catalyst field; ``eps`` is the particle mass."""

    rho: float
    eps: float
    dt: float
    cap: int = 10_000_000

    def __post_init__(self):
        if self.rho < 0 or self.eps <= 0 or self.dt <= 0 or self.cap < 1:
            raise ValueError("invalid reactant configuration")


@dataclass(frozen=True)
class ParticleSystem:
    positions: np.ndarray
    mass: float
    time: float
    seed: int | None = None

    @property
    def count(self) -> int:
        return len(self.positions)

    @property
    def total_mass(self) -> float:
        return self.mass * self.count

    def pair(self, phi) -> float:
        """``<X, phi>`` for a callable ``phi``."""
        if self.count == 0:
            return 0.0
        return self.mass * float(np.sum(phi(self.positions)))

    def as_measure(self) -> MeasureSpec:
        return MeasureSpec.atoms(self.positions, np.full(self.count, self.mass))

    def to_csv(self) -> str:
        d = self.positions.shape[1] if self.positions.ndim == 2 else 0
        head = ",".join([f"x{i + 1}" for i in range(d)] + ["mass"])
        rows = [",".join([repr(float(v)) for v in p] + [repr(self.mass)]) for p in self.positions]
        return "\n".join([head] + rows) + "\n"


def offspring_law(rate: float, dt: float) -> np.ndarray:
    """``P(n offspring)`` for ``n = 0..`` truncated where the tail drops below 1e-16."""
    a = 0.5 * rate * dt
    if a == 0:
        return np.array([0.0, 1.0])
    p0 = a / (1 + a)
    q = a / (1 + a)
    n = max(2, int(math.log(1e-16) / math.log(q)) + 2) if q > 0 else 2
    probs = np.empty(n)
    probs[0] = p0
    probs[1:] = (1 / (1 + a)) ** 2 * q ** np.arange(n - 1)
    return probs


@njit(cache=True)
def _evolve(pos, rate_grid, origin, h, n, side, rate_const, dt, nsteps, seed, cap):
    np.random.seed(seed)
    d = pos.shape[1]
    cur = pos.copy()
    sdt = math.sqrt(dt)
    use_grid = rate_grid.size > 0
    for _ in range(nsteps):
        m = cur.shape[0]
        if m == 0:
            break
        counts = np.empty(m, np.int64)
        total = 0
        for i in range(m):
            if use_grid:
                flat = 0
                for j in range(d):
                    c = int(round((cur[i, j] - origin) / h)) % n
                    flat = flat * n + c
                r = rate_grid[flat]
            else:
                r = rate_const
            a = 0.5 * r * dt
            if a == 0.0:
                counts[i] = 1
            else:
                u = np.random.random()
                if u < a / (1.0 + a):
                    counts[i] = 0
                else:
                    q = a / (1.0 + a)
                    v = 1.0 - np.random.random()
                    counts[i] = 1 + int(math.floor(math.log(v) / math.log(q)))
            total += counts[i]
        if total > cap:
            return cur, -1
        nxt = np.empty((total, d))
        o = 0
        for i in range(m):
            for _c in range(counts[i]):
                for j in range(d):
                    x = cur[i, j] + sdt * np.random.standard_normal()
                    if side > 0.0:
                        x = origin + ((x - origin) % side)
                    nxt[o, j] = x
                o += 1
        cur = nxt
    return cur, 0


def simulate(mu: MeasureSpec, t: float, config: ReactantConfig, medium=None, lattice: Lattice | None = None,
             seed: int = 0, initial: np.ndarray | None = None) -> ParticleSystem:
    """Run one replica up to time ``t``.

    ``medium`` is either a constant catalyst value or a catalyst raster on
    ``lattice`` (nearest-point lookup, periodic). With a lattice, particles
    live on its torus.
    """
    rng = child_rng(seed, 0)
    pos = mu.poisson_points(1.0 / config.eps, rng) if initial is None else np.asarray(initial, dtype=float)
    pos = np.ascontiguousarray(pos, dtype=float).reshape(-1, mu.d)
    nsteps = int(math.ceil(t / config.dt - 1e-12)) if t > 0 else 0
    dt = t / nsteps if nsteps else 0.0
    scale = RATE_CALIBRATION * config.rho / config.eps
    if lattice is not None:
        grid = np.ascontiguousarray(scale * np.asarray(medium, dtype=float).ravel())
        if grid.size != int(np.prod(lattice.shape)):
            raise ValueError("medium raster does not match the lattice")
        geo = (float(lattice.origin), float(lattice.spacing), lattice.n, float(lattice.side))
        rate_const = 0.0
    else:
        grid = np.zeros(0)
        geo = (0.0, 1.0, 1, 0.0)
        rate_const = scale * float(medium or 0.0)
    out, status = _evolve(pos, grid, *geo, rate_const, dt, nsteps, child_seed(seed, 1) & 0xFFFFFFFF, config.cap)
    if status < 0:
        raise PopulationExplosion(f"particle count exceeded cap {config.cap}")
    return ParticleSystem(out, config.eps, t, seed)


def laplace_samples(mu: MeasureSpec, phi, t: float, config: ReactantConfig, runs: int, medium=None,
                    lattice: Lattice | None = None, seed: int = 0) -> np.ndarray:
    """``<X_t, phi>`` over ``runs`` independent replicas."""
    return np.array([simulate(mu, t, config, medium, lattice, child_seed(seed, r)).pair(phi)
                     for r in range(runs)])


def initial_transform(phi_values, eps: float) -> np.ndarray:
    """``(1 - exp(-eps phi)) / eps``: the initial condition matching a particle mass ``eps``."""
    return -np.expm1(-eps * np.asarray(phi_values, dtype=float)) / eps


def rescale(obj, k: float):
    """``X^k_t(B) = k^-d X_{k^2 t}(kB)``: positions / k, masses * k^-d, time / k^2."""
    if k <= 0:
        raise ValueError("k must be positive")
    if isinstance(obj, ParticleSystem):
        d = obj.positions.shape[1]
        return ParticleSystem(obj.positions / k, obj.mass * k ** (-d), obj.time / k ** 2, obj.seed)
    if isinstance(obj, MeasureSpec) and obj.kind == "atoms":
        return MeasureSpec.atoms(obj.points / k, obj.masses * k ** (-obj.d))
    raise TypeError("rescale needs a ParticleSystem or an atomic MeasureSpec")
