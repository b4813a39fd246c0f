"""Shot-noise sampler for the gamma-stable random measure.

Atoms of weight at least ``eps_min`` form a Poisson process with intensity
``dz * c_gamma * eps^(-1-gamma) d eps``, ``c_gamma = gamma / G(1 - gamma)``.
They are generated largest first by inverting the tail of the weight
measure at the arrival times of a unit-rate Poisson process, so lowering
``eps_min`` appends atoms without touching the ones already drawn.

Atoms below ``eps_min`` are replaced by their mean: a uniform drift of
density ``c_gamma eps_min^(1-gamma) / (1-gamma)`` over the sampling region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..brownian.testfunctions import ball_volume
from ..seeding import child_rng

BLOCK = 4096


def c_gamma(gamma: float) -> float:
    _check_gamma(gamma)
    return gamma / math.gamma(1.0 - gamma)


def _check_gamma(gamma):
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must lie in (0, 1)")


def truncation_bias_bound(eps_min: float, gamma: float, volume: float) -> float:
    """Expected total mass of the atoms below ``eps_min`` in ``volume``."""
    if eps_min < 0 or volume < 0:
        raise ValueError("inputs must be non-negative")
    return c_gamma(gamma) * volume * eps_min ** (1.0 - gamma) / (1.0 - gamma)


def expected_count(eps_min: float, gamma: float, volume: float) -> float:
    return c_gamma(gamma) / gamma * volume * eps_min ** (-gamma)


def residual_std(eps_min: float, gamma: float, volume: float) -> float:
    """Standard deviation of the dropped mass in ``volume`` after compensation."""
    return math.sqrt(c_gamma(gamma) * volume * eps_min ** (2.0 - gamma) / (2.0 - gamma))


def default_eps_min(gamma: float, d: int, rel: float = 1e-2) -> float:
    """Truncation level at which the compensated error of the smoothed field is
    ``rel`` times its typical size ``|B_1|^(1/gamma)``."""
    vb = ball_volume(d)
    target = rel * vb ** (1.0 / gamma)
    return (target ** 2 * (2.0 - gamma) / (c_gamma(gamma) * vb)) ** (1.0 / (2.0 - gamma))


@dataclass(frozen=True)
class StableMediumSample:
    """Atoms of one medium realization on ``window`` enlarged by ``pad``."""

    locations: np.ndarray
    weights: np.ndarray
    lo: tuple
    hi: tuple
    pad: float
    gamma: float
    eps_min: float
    seed: int
    drift: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def region_lo(self) -> np.ndarray:
        return np.asarray(self.lo) - self.pad

    @property
    def region_hi(self) -> np.ndarray:
        return np.asarray(self.hi) + self.pad

    @property
    def region_volume(self) -> float:
        return float(np.prod(self.region_hi - self.region_lo))

    def __len__(self) -> int:
        return self.weights.size

    def pair(self, phi, drift_mass: float | None = None) -> float:
        """``<Gamma, phi>`` including the drift part over the sampling region.

        ``drift_mass`` is ``int phi`` over the region, if already known.
        """
        s = float(np.sum(self.weights * phi(self.locations))) if len(self) else 0.0
        if self.drift > 0:
            if drift_mass is None:
                drift_mass = phi.integral(self.region_lo, self.region_hi)
            s += self.drift * drift_mass
        return s

    def truncated(self, eps_min: float) -> "StableMediumSample":
        """The same realization seen with a coarser truncation level."""
        if eps_min < self.eps_min:
            raise ValueError("can only coarsen the truncation")
        keep = self.weights >= eps_min
        drift = self.drift and truncation_bias_bound(eps_min, self.gamma, 1.0)
        return StableMediumSample(self.locations[keep], self.weights[keep], self.lo, self.hi, self.pad,
                                  self.gamma, eps_min, self.seed, drift)

    def dilated(self, f: float) -> "StableMediumSample":
        """Image under ``z -> f z`` rescaled by ``f^(d/gamma)``: again a stable realization.

        Self-similarity ``Gamma(f A) = f^(d/gamma) Gamma(A)`` in law means the
        result has the exact law on the dilated window, truncated at
        ``f^(d/gamma) eps_min``.
        """
        if f <= 0:
            raise ValueError("dilation factor must be positive")
        s = f ** (self.d / self.gamma)
        eps = self.eps_min * s
        drift = self.drift and truncation_bias_bound(eps, self.gamma, 1.0)
        return StableMediumSample(self.locations * f, self.weights * s, tuple(f * np.asarray(self.lo)),
                                  tuple(f * np.asarray(self.hi)), self.pad * f, self.gamma, eps, self.seed,
                                  drift, dict(self.meta, dilation=f))


def sample_stable_measure(window, gamma: float, eps_min: float, pad: float = 1.0, seed: int = 0,
                          compensate: bool = True, max_atoms: int = 200_000_000) -> StableMediumSample:
    """Draw one truncated realization; ``window`` is ``(lo, hi)`` with one entry per axis."""
    _check_gamma(gamma)
    if eps_min <= 0:
        raise ValueError("eps_min must be positive")
    if pad < 0:
        raise ValueError("pad must be non-negative")
    lo = np.atleast_1d(np.asarray(window[0], dtype=float))
    hi = np.atleast_1d(np.asarray(window[1], dtype=float))
    if lo.shape != hi.shape or np.any(hi < lo):
        raise ValueError("window must satisfy lo <= hi")
    d = lo.size
    rlo, rhi = lo - pad, hi + pad
    volume = float(np.prod(rhi - rlo))
    drift = truncation_bias_bound(eps_min, gamma, 1.0) if compensate else 0.0
    key = (tuple(lo), tuple(hi))
    if volume == 0.0 or np.any(hi == lo):
        return StableMediumSample(np.zeros((0, d)), np.zeros(0), *key, pad, gamma, eps_min, seed,
                                  0.0 if np.any(hi == lo) else drift)
    if expected_count(eps_min, gamma, volume) > max_atoms:
        raise MemoryError("expected atom count exceeds max_atoms; raise eps_min")
    c = c_gamma(gamma)
    arrivals_rng = child_rng(seed, 0)
    place_rng = child_rng(seed, 1)
    # tail of the weight measure: nu([e, inf)) = (c / gamma) * volume * e^-gamma
    scale = gamma / (c * volume)
    weights, locations = [], []
    last = 0.0
    while True:
        arr = last + np.cumsum(arrivals_rng.standard_exponential(BLOCK))
        last = arr[-1]
        w = (scale * arr) ** (-1.0 / gamma)
        u = place_rng.random((BLOCK, d))
        m = int(np.searchsorted(-w, -eps_min, side="right"))
        weights.append(w[:m])
        locations.append(rlo + u[:m] * (rhi - rlo))
        if m < BLOCK:
            break
    weights = np.concatenate(weights)
    locations = np.concatenate(locations)
    weights.setflags(write=False)
    locations.setflags(write=False)
    return StableMediumSample(locations, weights, *key, pad, gamma, eps_min, seed, drift)
