"""Experiment configuration: versioned JSON with a stable digest."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..brownian.measures import MeasureSpec
from ..brownian.testfunctions import TestFunction
from ..lattice import Lattice
from ..medium.sampler import default_eps_min
from ..pde.config import ScalingConfig, critical_index

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs; ``kappa = None`` means the critical index.

    ``mu_width``/``phi_width`` are the standard deviations of the Gaussian
    initial density (unit mass) and test function (peak ``phi_amplitude``).
    ``extrapolate`` makes the sweep combine ``steps`` and ``steps/2``
    solves to cancel the first-order time-step error of the gaps.
    """

    d: int = 3
    gamma: float = 0.8
    rho: float = 1.0
    kappa: float | None = None
    t: float = 0.25
    L: float = 4.0
    steps: int = 64
    extrapolate: bool = True
    k_grid: tuple = (4, 8, 16)
    media: int = 12
    eps_rel: float = 1e-2
    mu_width: float = 0.5
    phi_width: float = 0.5
    phi_amplitude: float = 0.2
    stiff_limit: float = math.inf
    paths: int = 20000
    constant_paths: int = 20000
    constant_horizon: float = 1e6
    constant_dt: float = 2e-3
    ref_n: int = 64
    seed: int = 0
    name: str = "experiment"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        ks = list(self.k_grid)
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k grid must be strictly increasing")
        if self.d * self.gamma <= 2:
            raise ValueError("subcritical configuration")
        object.__setattr__(self, "k_grid", tuple(ks))

    @property
    def kappa_value(self) -> float:
        return critical_index(self.gamma, self.d) if self.kappa is None else self.kappa

    @property
    def eps_min(self) -> float:
        return default_eps_min(self.gamma, self.d, self.eps_rel)

    def lattice(self, k: float) -> Lattice:
        lat = Lattice.for_scale(self.d, self.L, k)
        if not lat.max_spacing_for(k):
            raise ValueError(f"lattice does not resolve the medium at k={k}")
        return lat

    def scaling(self, k: float) -> ScalingConfig:
        lat = self.lattice(k)
        return ScalingConfig(self.d, self.gamma, self.rho, k, self.kappa_value, self.t, self.steps,
                             self.L, lat.n, self.stiff_limit)

    def phi(self) -> TestFunction:
        return TestFunction.gaussian(self.d, self.phi_width, self.phi_amplitude)

    def mu(self, lattice: Lattice) -> MeasureSpec:
        s = self.mu_width
        dens = TestFunction.gaussian(self.d, s, (2 * math.pi * s * s) ** (-self.d / 2))
        return MeasureSpec.from_function(lattice, dens)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_grid"] = list(self.k_grid)
        d["schema_version"] = SCHEMA_VERSION
        return d

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()[:16]


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def persist(config: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.write_text(canonical_json(config.to_dict()))
    return path


def load(path) -> ExperimentConfig:
    raw = json.loads(Path(path).read_text())
    version = raw.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ValueError(f"config schema version {version} != {SCHEMA_VERSION}")
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "k_grid" in raw:
        raw["k_grid"] = tuple(raw["k_grid"])
    return ExperimentConfig(**raw)
