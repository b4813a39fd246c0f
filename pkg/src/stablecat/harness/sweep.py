"""Fluctuation sweep: medium-averaged gaps of the linearized fields over a k grid.

Media are coupled across k through self-similarity: one realization is drawn
at the largest k with enough padding for the smallest, and every other k
uses its dilation (see ``StableMediumSample.dilated``). Each k still sees a
medium with the exact law, while the k-to-k comparison shares its noise.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..constants import LimitConstants, estimate_constants
from ..lattice import Lattice
from ..medium.field import MediumField, rasterize, window_for
from ..medium.sampler import sample_stable_measure
from ..pde.config import critical_index
from ..pde.limit import fluctuation_functional
from ..pde.solvers import solve_fields
from ..seeding import child_seed
from .config import ExperimentConfig

ROW_FIELDS = ("k", "media", "w_gap", "w_gap_se", "w_gap_var", "m_gap", "m_gap_se", "m_gap_var",
              "target_upper", "target_lower", "bracketed")
MEDIUM_FIELDS = ("k", "medium", "seed", "atoms", "w_gap", "m_gap")


@dataclass(frozen=True)
class SweepRow:
    k: float
    w_gaps: np.ndarray
    m_gaps: np.ndarray
    target_upper: float
    target_lower: float

    @property
    def media(self) -> int:
        return len(self.w_gaps)

    @property
    def w_mean(self) -> float:
        return float(np.mean(self.w_gaps))

    @property
    def m_mean(self) -> float:
        return float(np.mean(self.m_gaps))

    @property
    def w_var(self) -> float:
        return float(np.var(self.w_gaps, ddof=1))

    @property
    def m_var(self) -> float:
        return float(np.var(self.m_gaps, ddof=1))

    @property
    def bracketed(self) -> bool:
        """``0 <= m-gap <= w-gap`` for every medium, i.e. ``w_k <= m_k <= h`` paired with ``mu``."""
        tol = 1e-12 * max(1.0, float(np.max(np.abs(self.w_gaps))))
        return bool(np.all(self.m_gaps >= -tol) and np.all(self.w_gaps >= self.m_gaps - tol))

    def values(self) -> tuple:
        n = self.media
        return (self.k, n, self.w_mean, math.sqrt(self.w_var / n), self.w_var, self.m_mean,
                math.sqrt(self.m_var / n), self.m_var, self.target_upper, self.target_lower, int(self.bracketed))


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    seeds: tuple
    config_hash: str
    constants: dict
    version: str = __version__
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def ks(self) -> list:
        return [r.k for r in self.rows]

    def w_deviation(self) -> np.ndarray:
        return np.array([abs(r.w_mean - r.target_upper) for r in self.rows])

    def m_deviation(self) -> np.ndarray:
        return np.array([abs(r.m_mean - r.target_lower) for r in self.rows])

    def terminal_relative_gap(self) -> tuple[float, float]:
        r = self.rows[-1]
        return abs(r.w_mean / r.target_upper - 1), abs(r.m_mean / r.target_lower - 1)

    def expectation_trend(self) -> dict:
        w, m = self.w_deviation(), self.m_deviation()
        rw, rm = self.terminal_relative_gap()
        return {"w_nonincreasing": bool(np.all(np.diff(w) <= 0)),
                "m_nonincreasing": bool(np.all(np.diff(m) <= 0)),
                "w_terminal_rel": rw, "m_terminal_rel": rm}

    def variance_trend(self) -> dict:
        wv = np.array([r.w_var for r in self.rows])
        mv = np.array([r.m_var for r in self.rows])
        return {"w_nonincreasing": bool(np.all(np.diff(wv) <= 0)),
                "m_nonincreasing": bool(np.all(np.diff(mv) <= 0))}

    @property
    def all_bracketed(self) -> bool:
        return all(r.bracketed for r in self.rows)

    def to_csv(self) -> str:
        lines = [",".join(ROW_FIELDS)]
        lines += [",".join(_fmt(v) for v in r.values()) for r in self.rows]
        return "\n".join(lines) + "\n"

    def media_csv(self) -> str:
        lines = [",".join(MEDIUM_FIELDS)]
        atoms = self.meta.get("atoms", [])
        for r in self.rows:
            for j, (wg, mg) in enumerate(zip(r.w_gaps, r.m_gaps)):
                n = atoms[j] if j < len(atoms) else -1
                lines.append(",".join(_fmt(v) for v in (r.k, j, self.seeds[j], n, wg, mg)))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {"config_hash": self.config_hash, "seeds": list(self.seeds), "version": self.version,
                "constants": self.constants, "expectation": self.expectation_trend(),
                "variance": self.variance_trend(), "bracketed": self.all_bracketed}


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def reference_functional(config: ExperimentConfig) -> float:
    """``F`` at ``c = 1``; linear in ``c``."""
    lat = Lattice(config.d, config.ref_n, config.L)
    return fluctuation_functional(config.mu(lat), [(config.t, config.phi())], 1.0, config.gamma, lat)


def _gaps(sc, raster, phi, mu) -> np.ndarray:
    out = solve_fields(sc, raster, phi, which=("w", "m"))
    h = out["heat"].final
    return np.array([mu.pair(h - out["w"].final, sc.lattice), mu.pair(h - out["m"].final, sc.lattice)])


def gaps_for_medium(config: ExperimentConfig, k: float, raster: np.ndarray) -> tuple[float, float]:
    """``<mu, h - w_k(t)>`` and ``<mu, h - m_k(t)>`` for one catalyst raster.

    With ``config.extrapolate`` the gaps are Richardson-extrapolated from
    ``steps`` and ``steps/2`` (the splitting is first order in ``dt``).
    """
    sc = config.scaling(k)
    mu, phi = config.mu(sc.lattice), config.phi()
    g = _gaps(sc, raster, phi, mu)
    if config.extrapolate:
        if config.steps % 2:
            raise ValueError("extrapolation needs an even step count")
        g = 2 * g - _gaps(sc.with_(steps=config.steps // 2), raster, phi, mu)
    return float(g[0]), float(g[1])


def run_fluctuation_sweep(config: ExperimentConfig, constants: LimitConstants | None = None,
                          frozen: float | None = None, progress=None) -> SweepReport:
    """Solve ``w_k, m_k`` on ``config.media`` coupled media per k and aggregate.

    ``frozen`` replaces every medium by the constant catalyst value given
    (then all media coincide). ``progress(k, j, w_gap, m_gap)`` is called
    after each solve.
    """
    if config.media < 2:
        raise ValueError("at least two media are needed for a variance")
    if not math.isclose(config.kappa_value, critical_index(config.gamma, config.d)):
        raise ValueError("the fluctuation sweep runs at the critical index")
    ks = config.k_grid
    for k in ks:
        config.lattice(k)  # raises if the raster does not resolve the medium
    if constants is None:
        constants = estimate_constants(config.d, config.gamma, config.rho, config.constant_paths,
                                       config.constant_horizon, dt=config.constant_dt,
                                       seed=child_seed(config.seed, 0))
    f1 = reference_functional(config)
    upper, lower = constants.c_bar.value * f1, constants.c_under.value * f1
    kmax, kmin = max(ks), min(ks)
    lo, hi = window_for(config.lattice(kmax), kmax)
    seeds = tuple(child_seed(config.seed, 1, j) for j in range(config.media))
    gaps = {k: ([], []) for k in ks}
    atoms = []
    started = time.perf_counter()
    for j, s in enumerate(seeds):
        base = None
        if frozen is None:
            base = sample_stable_measure((lo, hi), config.gamma, config.eps_min, kmax / kmin, s)
            atoms.append(len(base))
        for k in ks:
            lat = config.lattice(k)
            if frozen is None:
                raster = rasterize(MediumField(base.dilated(k / kmax), k), lat)
            else:
                raster = np.full(lat.shape, float(frozen))
            wg, mg = gaps_for_medium(config, k, raster)
            gaps[k][0].append(wg)
            gaps[k][1].append(mg)
            if progress is not None:
                progress(k, j, wg, mg)
    rows = tuple(SweepRow(k, np.array(gaps[k][0]), np.array(gaps[k][1]), upper, lower) for k in ks)
    consts = {"c_bar": constants.c_bar.value, "c_bar_se": constants.c_bar.se,
              "c_under": constants.c_under.value, "c_under_se": constants.c_under.se, "F1": f1}
    return SweepReport(rows, seeds, config.digest(), consts,
                       meta={"atoms": atoms, "wall_time": time.perf_counter() - started})
