"""Statistical checks of the sampler against the log-Laplace functional."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..brownian.testfunctions import default_points, midpoint_integral
from ..estimator import EstimatorResult
from .sampler import StableMediumSample

KS_C001 = 1.628  # c(alpha) of the two-sample KS test at alpha = 0.01


def _pairs(samples, phi):
    if not samples:
        raise ValueError("empty sample list")
    ref = samples[0]
    for s in samples:
        if (s.lo, s.hi, s.gamma) != (ref.lo, ref.hi, ref.gamma):
            raise ValueError("samples differ in window or gamma")
    mass = phi.integral(ref.region_lo, ref.region_hi) if any(s.drift for s in samples) else 0.0
    return np.array([s.pair(phi, drift_mass=mass) for s in samples])


def analytic_loglaplace(phi, gamma: float, lo=None, hi=None) -> float:
    """``exp(-int phi^gamma)``."""
    return math.exp(-phi.integral_power(gamma, lo, hi))


def empirical_loglaplace(samples: list[StableMediumSample], phi) -> EstimatorResult:
    """Mean of ``exp(-<Gamma, phi>)``; ``extra['analytic']`` holds ``exp(-int phi^gamma)``."""
    started = time.perf_counter()
    vals = np.exp(-_pairs(samples, phi))
    g = samples[0].gamma
    s = samples[0]
    analytic = analytic_loglaplace(phi, g, s.region_lo, s.region_hi)
    if phi.amplitude == 0:
        return EstimatorResult(1.0, 0.0, len(samples), s.seed, 0.0, {"analytic": 1.0})
    return EstimatorResult.from_samples(vals, s.seed, started, analytic=analytic)


def weighted_identity(samples: list[StableMediumSample], phi, psi, n: int | None = None) -> EstimatorResult:
    """Mean of ``<Gamma, phi> exp(-<Gamma, psi>)``; ``extra['analytic']`` holds
    ``gamma int phi psi^(gamma-1) exp(-int psi^gamma)``."""
    started = time.perf_counter()
    a = _pairs(samples, phi)
    b = _pairs(samples, psi)
    s = samples[0]
    g = s.gamma
    lo, hi = s.region_lo, s.region_hi

    def integrand(x):
        p = psi(x)
        out = np.zeros_like(p)
        pos = p > 0
        out[pos] = phi(x)[pos] * p[pos] ** (g - 1.0)
        return out

    cross = midpoint_integral(integrand, lo, hi, n or default_points(s.d))
    analytic = g * cross * math.exp(-psi.integral_power(g, lo, hi))
    return EstimatorResult.from_samples(a * np.exp(-b), s.seed, started, analytic=analytic)


@dataclass(frozen=True)
class ScalingReport:
    statistic: float
    critical_value: float
    pvalue: float
    n: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_value


def scaling_check(small: list[StableMediumSample], large: list[StableMediumSample], k: float, phi,
                  exponent: float | None = None) -> ScalingReport:
    """KS distance between ``<Gamma, phi(./k)>`` on ``large`` and ``k^(d/gamma) <Gamma, phi>`` on ``small``.

    ``exponent`` overrides ``d/gamma`` (negative controls).
    """
    if len(small) != len(large):
        raise ValueError("sample-size mismatch")
    g = small[0].gamma
    d = small[0].d
    p = d / g if exponent is None else exponent
    a = _pairs(large, phi.dilated(k))
    b = k ** p * _pairs(small, phi)
    res = stats.ks_2samp(a, b)
    n = len(small)
    return ScalingReport(float(res.statistic), KS_C001 * math.sqrt(2.0 / n), float(res.pvalue), n)
