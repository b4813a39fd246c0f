"""Scaling configuration and the two scaling indices."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

from ..lattice import Lattice


def critical_index(gamma: float, d: int, strict: bool = True) -> float:
    """``(gamma d - 2) / (1 + gamma)``; subcritical inputs raise unless ``strict=False``."""
    val = (gamma * d - 2.0) / (1.0 + gamma)
    if strict and gamma * d <= 2.0:
        raise ValueError(f"subcritical: gamma*d = {gamma * d} <= 2 (index would be {val})")
    return val


def variance_index(gamma: float, d: int) -> float | None:
    """``((2 gamma - 1) d - 2 gamma) / (2 gamma)`` when positive and ``gamma > 1/2``, else None."""
    if gamma <= 0.5:
        return None
    if d <= 2 * gamma / (2 * gamma - 1):
        return None
    return ((2 * gamma - 1) * d - 2 * gamma) / (2 * gamma)


@dataclass(frozen=True)
class ScalingConfig:
    """Model and discretization parameters of one hydrodynamic solve.

    The lattice is the torus ``[-L/2, L/2)^d`` with ``N`` points per axis.
    ``stiff_limit`` bounds ``dt * max(a) * max(u0)``; see ``check_stiffness``.
    """

    d: int
    gamma: float
    rho: float
    k: float
    kappa: float
    t: float
    steps: int
    L: float
    N: int
    stiff_limit: float = 10.0

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("d >= 3 required")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.d * self.gamma <= 2:
            raise ValueError("subcritical configuration: need d > 2/gamma")
        if self.rho < 0 or self.k <= 0 or self.kappa < 0 or self.t < 0 or self.steps < 1:
            raise ValueError("invalid scaling parameters")

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.d, self.N, self.L)

    @property
    def dt(self) -> float:
        return self.t / self.steps

    @property
    def kappa_c(self) -> float:
        return critical_index(self.gamma, self.d)

    @property
    def kappa_var(self) -> float | None:
        return variance_index(self.gamma, self.d)

    @property
    def amplitude(self) -> float:
        """``k^kappa``: the initial-state scaling."""
        return self.k ** self.kappa

    @property
    def coupling(self) -> float:
        """``k^(2-d) rho``: multiplies ``Gamma^1(kx)`` in the reaction term."""
        return self.k ** (2 - self.d) * self.rho

    @property
    def resolves_medium(self) -> bool:
        return self.lattice.max_spacing_for(self.k)

    def with_(self, **kw) -> "ScalingConfig":
        d = asdict(self)
        d.update(kw)
        return ScalingConfig(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def check_stiffness(self, amax: float, umax: float) -> float:
        stiff = self.dt * amax * umax
        if stiff > self.stiff_limit and not math.isinf(self.stiff_limit):
            raise ValueError(f"time step does not resolve the reaction: dt*max(a)*max(u0) = {stiff:.3g}"
                             f" > {self.stiff_limit}")
        return stiff
