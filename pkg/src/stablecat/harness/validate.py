"""Oracle suites for the medium sampler and the particle system, shared by the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..brownian.measures import MeasureSpec
from ..brownian.testfunctions import TestFunction
from ..estimator import EstimatorResult
from ..lattice import Lattice
from ..medium.field import MediumField, rasterize, window_for
from ..medium.sampler import default_eps_min, sample_stable_measure
from ..medium.validation import ScalingReport, empirical_loglaplace, scaling_check, weighted_identity
from ..pde.config import ScalingConfig
from ..pde.solvers import solve_fields
from ..reactant import ReactantConfig, laplace_samples, rescale, simulate, initial_transform
from ..seeding import child_seed

HALF_WIDTH = 1.5


@dataclass(frozen=True)
class Check:
    """One oracle comparison: ``value +- se`` against ``target``."""

    name: str
    value: float
    se: float
    target: float
    n: int

    @property
    def z(self) -> float:
        return (self.value - self.target) / self.se if self.se > 0 else (0.0 if self.value == self.target else math.inf)

    def passed(self, n_se: float = 3.0) -> bool:
        return abs(self.z) <= n_se

    def values(self) -> tuple:
        return (self.name, self.value, self.se, self.target, self.n, self.z, int(self.passed()))


CHECK_FIELDS = ("name", "value", "se", "target", "n", "z", "passed")


def checks_to_csv(checks) -> str:
    lines = [",".join(CHECK_FIELDS)]
    for c in checks:
        v = c.values()
        lines.append(",".join([v[0]] + [repr(float(x)) if isinstance(x, float) else str(x) for x in v[1:]]))
    return "\n".join(lines) + "\n"


def _from_result(name: str, r: EstimatorResult) -> Check:
    return Check(name, r.value, r.se, r.extra["analytic"], r.n)


def battery(d: int) -> list[tuple[str, TestFunction]]:
    """Five test functions with closed-form or well-resolved ``int phi^gamma``."""
    lo, hi = [-0.5] * d, [0.5] * d
    return [("box1", TestFunction.box(lo, hi, 1.0)),
            ("box4", TestFunction.box(lo, hi, 4.0)),
            ("gauss", TestFunction.gaussian(d, 0.3, 2.0)),
            ("exp", TestFunction.exponential(d, 4.0, 1.5)),
            ("mollified", TestFunction.mollified(d, 0.4, 0.1, 1.0))]


def medium_samples(d: int, gamma: float, n: int, seed: int, eps_min: float | None = None,
                   half_width: float = HALF_WIDTH) -> list:
    eps = eps_min if eps_min is not None else {1: 1e-6}.get(d, 2e-3)
    window = ([-half_width] * d, [half_width] * d)
    return [sample_stable_measure(window, gamma, eps, 0.0, child_seed(seed, i)) for i in range(n)]


def medium_suite(d: int, gamma: float, n: int = 10_000, seed: int = 0) -> list[Check]:
    """Laplace functional on the battery plus the weighted identity."""
    samples = medium_samples(d, gamma, n, seed)
    out = [_from_result(f"loglaplace_{name}_d{d}", empirical_loglaplace(samples, phi)) for name, phi in battery(d)]
    psi = TestFunction.box([-HALF_WIDTH] * d, [HALF_WIDTH] * d, 0.5)
    out.append(_from_result(f"weighted_d{d}", weighted_identity(samples, TestFunction.gaussian(d, 0.3, 1.0), psi)))
    return out


def scaling_suite(d: int, gamma: float, k: float, n: int = 2000, seed: int = 0,
                  exponent: float | None = None) -> ScalingReport:
    """KS comparison of ``<Gamma, phi(./k)>`` against ``k^(d/gamma) <Gamma, phi>``."""
    eps_small = {1: 1e-5}.get(d, 1e-2)
    small = medium_samples(d, gamma, n, child_seed(seed, 0), eps_small, 1.0)
    large = medium_samples(d, gamma, n, child_seed(seed, 1), eps_small * k ** (d / gamma), float(k))
    return scaling_check(small, large, k, TestFunction.gaussian(d, 0.25, 1.0), exponent)


def reactant_homogeneous(runs: int = 4000, seed: int = 0, d: int = 3, rho: float = 1.0, rho_bar: float = 3.0,
                         theta: float = 1.5, t: float = 0.5, eps: float = 0.02, dt: float = 0.01) -> Check:
    """Constant catalyst and constant ``phi``: ``E exp(-<X_t, phi>)`` against the scalar Riccati solution."""
    mu = MeasureSpec.lebesgue([-1.0] * d, [1.0] * d, 0.25)
    cfg = ReactantConfig(rho=rho, eps=eps, dt=dt)
    x = laplace_samples(mu, TestFunction.constant(d, theta), t, cfg, runs, medium=rho_bar, seed=seed)
    u0 = float(initial_transform(theta, eps))
    u = u0 / (1.0 + rho * rho_bar * u0 * t)
    r = EstimatorResult.from_samples(np.exp(-x), seed)
    return Check("reactant_homogeneous", r.value, r.se, math.exp(-mu.total_mass * u), runs)


def reactant_quenched(medium_seed: int, runs: int = 2000, seed: int = 0, d: int = 3, gamma: float = 0.8,
                      rho: float = 1.0, k: float = 2.0, t: float = 0.25, L: float = 3.0, eps: float = 0.05,
                      dt: float = 0.01, steps: int = 128) -> Check:
    """Fixed sampled medium at scale ``k``: particle Laplace functional against the ``u_k`` solver.

    Particles live in catalyst coordinates on the torus of side ``k L`` and
    are mapped back with the hydrodynamic rescaling.
    """
    lat = Lattice.for_scale(d, L, k)
    lo, hi = window_for(lat, k)
    s = sample_stable_measure((lo, hi), gamma, default_eps_min(gamma, d), 1.0, medium_seed)
    raster = rasterize(MediumField(s, k), lat)
    phi = TestFunction.gaussian(d, 0.3, 1.0)
    # unit-mass Gaussian initial measure: exact Poisson points for particles, grid density for the solver
    mu_width = 0.3
    mu = MeasureSpec.from_function(lat, TestFunction.gaussian(d, mu_width, (2 * math.pi * mu_width ** 2) ** (-d / 2)))
    # rescaled particle mass eps k^-d
    sc = ScalingConfig(d, gamma, rho, k, 0.0, t, steps, L, lat.n, math.inf)
    u = solve_fields(sc, raster, initial_transform(phi.on_lattice(lat), eps * k ** (-d)), which=("u",))["u"]
    target = math.exp(-mu.pair(u.final, lat))
    cat = Lattice(d, lat.n, k * lat.side, k * lat.origin)
    cfg = ReactantConfig(rho=rho, eps=eps, dt=dt)
    vals = np.empty(runs)
    for r in range(runs):
        rs = child_seed(seed, r)
        rng = np.random.default_rng(child_seed(rs, 0))
        start = k * mu_width * rng.standard_normal((rng.poisson(k ** d / eps), d))
        x = simulate(mu, k * k * t, cfg, raster, cat, rs, initial=start)
        vals[r] = math.exp(-rescale(x, k).pair(phi))
    e = EstimatorResult.from_samples(vals, seed)
    return Check(f"reactant_quenched_{medium_seed}", e.value, e.se, target, runs)
