"""Quenched variance of the rescaled fluctuation functional for a fixed medium.

    V_k = 2 rho k^(2 kappa - 2d) int_0^(k^2 t) ds int dx Gamma^1(x) [S_(k^2 t - s) phi(./k)]^2(x)
        = 2 rho k^(2 kappa - 2d + 2) sum_j w_j int_0^t dr int_{B(z_j, 1)} [S_(t-r) phi(x/k)]^2 dx

For a Gaussian ``phi`` the square of its heat flow is Gaussian, so every
ball integral is a non-central chi-square probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..brownian.testfunctions import TestFunction, ball_volume
from ..medium.sampler import StableMediumSample, sample_stable_measure
from ..pde.config import variance_index
from ..seeding import child_seed


def _ball_gauss(dist2, s2, d):
    # int_{B(z,1)} exp(-|x - c|^2 / (2 s2)) dx with |z - c|^2 = dist2
    return (2 * math.pi * s2) ** (d / 2) * stats.ncx2.cdf(1.0 / s2, d, dist2 / s2)


def quenched_variance(sample: StableMediumSample, phi: TestFunction, t: float, k: float, kappa: float,
                      rho: float, nodes: int = 24) -> float:
    """``V_k`` by Gauss-Legendre in time and exact ball integrals in space.

    The sample's drift (compensated small atoms) enters as a uniform density
    over its sampling region.
    """
    if phi.kind != "gaussian":
        raise ValueError("closed-form ball integrals need a Gaussian phi")
    if phi.amplitude == 0 or t == 0 or rho == 0:
        return 0.0
    d = sample.d
    A, sig2 = phi.amplitude, phi.width ** 2
    c = k * np.asarray(phi.center)
    z = sample.locations
    w = sample.weights
    dist2 = np.sum((z - c) ** 2, axis=1) if len(sample) else np.zeros(0)
    x, gw = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * t * (x + 1.0)
    gw = 0.5 * t * gw
    total = 0.0
    drift_mass = sample.drift * ball_volume(d)
    for rj, wj in zip(r, gw):
        v = sig2 + (t - rj)
        amp2 = A * A * (sig2 / v) ** d
        s2 = k * k * v / 2.0
        atoms = float(np.dot(w, _ball_gauss(dist2, s2, d))) if len(sample) else 0.0
        # uniform drift: int dx Gamma^1 f = drift |B_1| int f over (approximately) all space
        smooth = drift_mass * (2 * math.pi * s2) ** (d / 2) if drift_mass else 0.0
        total += wj * amp2 * (atoms + smooth)
    return 2.0 * rho * k ** (2 * kappa - 2 * d + 2) * total


def quenched_variance_direct(sample: StableMediumSample, phi: TestFunction, t: float, k: float, kappa: float,
                             rho: float, n_time: int = 64, n_ball: int = 4096, seed: int = 0) -> float:
    """Same double integral by a midpoint rule in ``s`` and a fixed quasi-uniform cloud in each ball."""
    d = sample.d
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_ball, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    cloud = g * rng.random((n_ball, 1)) ** (1.0 / d)
    vb = ball_volume(d)
    T = k * k * t
    ds = T / n_time
    total = 0.0
    for i in range(n_time):
        s = (i + 0.5) * ds
        for zj, wj in zip(sample.locations, sample.weights):
            pts = (zj + cloud) / k
            f = phi.heat_flow(t - s / (k * k), pts)
            total += ds * wj * vb * float(np.mean(f * f))
    return 2.0 * rho * k ** (2 * kappa - 2 * d) * total


@dataclass(frozen=True)
class ThresholdReport:
    kappa_var: float
    ks: tuple
    kappas: tuple
    median_log_var: dict
    slopes: dict

    @property
    def increasing_above(self) -> bool:
        return bool(np.all(np.diff(self.median_log_var[self.kappas[1]]) > 0))

    @property
    def decreasing_below(self) -> bool:
        return bool(np.all(np.diff(self.median_log_var[self.kappas[0]]) < 0))


def threshold_study(gamma: float = 0.8, d: int = 5, rho: float = 1.0, ks=(4, 8, 16), offset: float = 0.2,
                    media: int = 32, phi_width: float = 0.3, t: float = 0.1, atoms_target: float = 2e4,
                    seed: int = 0) -> ThresholdReport:
    """Median over media of ``log V_k`` at ``kappa_var -/+ offset``.

    One medium per replicate is drawn for the largest k; smaller k use its
    dilation, so every k sees the same macroscopic realization with a
    truncation level proportional to ``k^(d/gamma)``. The level is set so that
    each window holds about ``atoms_target`` atoms; the rest is carried by
    the drift.
    """
    from ..medium.sampler import c_gamma

    kv = variance_index(gamma, d)
    if kv is None:
        raise ValueError("no variance threshold for these parameters")
    phi = TestFunction.gaussian(d, phi_width)
    kmax = max(ks)
    reach = math.sqrt(phi_width ** 2 + t) * 6.0 + 1.0 / kmax
    half = kmax * reach
    volume = (2 * half + 2) ** d
    eps = (c_gamma(gamma) / gamma * volume / atoms_target) ** (1.0 / gamma)
    kappas = (kv - offset, kv + offset)
    logs = {kp: np.zeros((media, len(ks))) for kp in kappas}
    for m in range(media):
        s = sample_stable_measure(([-half] * d, [half] * d), gamma, eps, 1.0, child_seed(seed, m))
        for i, k in enumerate(ks):
            base = quenched_variance(s.dilated(k / kmax), phi, t, k, 0.0, rho)
            for kp in kappas:
                logs[kp][m, i] = math.log(base) + 2 * kp * math.log(k)
    med = {kp: np.median(v, axis=0) for kp, v in logs.items()}
    lk = np.log(np.asarray(ks, dtype=float))
    slopes = {kp: float(np.polyfit(lk, med[kp], 1)[0]) for kp in kappas}
    return ThresholdReport(kv, tuple(ks), kappas, med, slopes)
