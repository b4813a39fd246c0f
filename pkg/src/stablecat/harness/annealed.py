"""Medium-averaged gap of the linearized equation by Feynman-Kac sampling.

For one medium, ``w_k(t, x) = E_x[k^kappa phi(W_t) exp(-<Gamma, psi_W>)]`` with

    psi_W(y) = k^(2-d) rho int_0^t 1{|k W_s - y| <= 1} k^kappa S_{t-s} phi(W_s) ds.

Averaging over the medium replaces ``exp(-<Gamma, psi>)`` by
``exp(-int psi^gamma dy)``, so the annealed gap is

    E <mu, k^kappa S_t phi - w_k(t)> = |mu| k^kappa E[phi(W_t) (1 - exp(-J))],
    J = int psi_W(y)^gamma dy,   W_0 ~ mu / |mu|.

``J`` is estimated per path by importance sampling from the union of unit
balls around the (rescaled) path nodes. Needs a Gaussian ``phi`` so that the
heat flow along the path is available in closed form.
"""

from __future__ import annotations

import math
import time

import numpy as np
from numba import njit

from ..brownian.measures import MeasureSpec
from ..brownian.testfunctions import TestFunction, ball_volume
from ..estimator import EstimatorResult
from ..seeding import child_rng, child_seed

BATCH = 1024


@njit(cache=True)
def _unit_ball(d, out):
    # uniform point in the unit ball by rejection
    while True:
        r2 = 0.0
        for i in range(d):
            out[i] = 2.0 * np.random.random() - 1.0
            r2 += out[i] * out[i]
        if r2 <= 1.0:
            return


@njit(cache=True)
def _fk_kernel(starts, seeds, batch, t, nsteps, k, amp, coupling, gamma, width2, center, ysamples, vball):
    n_paths, d = starts.shape
    n_nodes = nsteps + 1
    dt = t / nsteps
    sdt = math.sqrt(dt)
    out_phi = np.zeros(n_paths)
    out_j = np.zeros(n_paths)
    nodes = np.empty((n_nodes, d))
    g = np.empty(n_nodes)
    wts = np.empty(n_nodes)
    y = np.empty(d)
    u = np.empty(d)
    for b in range(seeds.size):
        np.random.seed(seeds[b])
        lo = b * batch
        hi = min(n_paths, lo + batch)
        for p in range(lo, hi):
            for i in range(d):
                nodes[0, i] = starts[p, i]
            for s in range(1, n_nodes):
                for i in range(d):
                    nodes[s, i] = nodes[s - 1, i] + sdt * np.random.standard_normal()
            for s in range(n_nodes):
                v = width2 + (t - s * dt)
                r2 = 0.0
                for i in range(d):
                    q = nodes[s, i] - center[i]
                    r2 += q * q
                g[s] = amp * (width2 / v) ** (0.5 * d) * math.exp(-r2 / (2.0 * v))
                wts[s] = dt
            wts[0] = 0.5 * dt
            wts[n_nodes - 1] = 0.5 * dt
            r2 = 0.0
            for i in range(d):
                q = nodes[n_nodes - 1, i] - center[i]
                r2 += q * q
            out_phi[p] = math.exp(-r2 / (2.0 * width2))
            acc = 0.0
            for m in range(ysamples):
                c = int(np.random.random() * n_nodes)
                if c >= n_nodes:
                    c = n_nodes - 1
                _unit_ball(d, u)
                for i in range(d):
                    y[i] = k * nodes[c, i] + u[i]
                psi = 0.0
                cnt = 0
                for s in range(n_nodes):
                    r2 = 0.0
                    for i in range(d):
                        q = k * nodes[s, i] - y[i]
                        r2 += q * q
                    if r2 <= 1.0:
                        cnt += 1
                        psi += wts[s] * g[s]
                psi *= coupling
                # q(y) = cnt / (n_nodes |B_1|)
                acc += psi ** gamma * n_nodes * vball / cnt
            out_j[p] = acc / ysamples
    return out_phi, out_j


def annealed_w_gap(mu: MeasureSpec, phi: TestFunction, *, d: int, gamma: float, rho: float, k: float,
                   kappa: float, t: float, paths: int, seed: int = 0, node_spacing: float = 0.25,
                   ysamples: int = 64) -> EstimatorResult:
    """Annealed ``E <mu, k^kappa S_t phi - w_k(t)>`` on R^d.

    ``node_spacing`` is the typical path increment between nodes in catalyst
    units (``k sqrt(dt)``).
    """
    if phi.kind != "gaussian":
        raise ValueError("the path estimator needs a Gaussian test function")
    started = time.perf_counter()
    mass = mu.total_mass
    if t == 0 or rho == 0 or phi.amplitude == 0 or mass == 0:
        return EstimatorResult(0.0, 0.0, paths, seed, 0.0, {"nsteps": 0})
    nsteps = max(8, int(math.ceil(t * (k / node_spacing) ** 2)))
    starts = np.ascontiguousarray(mu.sample(paths, child_rng(seed, 0)))
    seeds = np.array([child_seed(seed, 1, b) & 0xFFFFFFFF for b in range((paths + BATCH - 1) // BATCH)],
                     dtype=np.int64)
    amp = k ** kappa * phi.amplitude
    coupling = k ** (2 - d) * rho
    ph, J = _fk_kernel(starts, seeds, BATCH, float(t), nsteps, float(k), amp, coupling, float(gamma),
                       phi.width ** 2, np.asarray(phi.center, dtype=float), int(ysamples), ball_volume(d))
    samples = mass * amp * ph * -np.expm1(-J)
    return EstimatorResult.from_samples(samples, seed, started, nsteps=nsteps, mean_J=float(np.mean(J)))
