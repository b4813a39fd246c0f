"""Non-negative test functions with exponential decay.

Each kind knows how to evaluate itself, how it is dominated by a reference
function ``C * exp(-lam |x|)``, and (where a closed form exists) how it is
transported by the heat semigroup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special, stats

KINDS = ("exponential", "gaussian", "mollified", "constant", "box")


def ball_volume(d: int, r: float = 1.0) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


@dataclass(frozen=True)
class TestFunction:
    """A member of the exponentially decaying non-negative test functions.

    Use the classmethod constructors rather than the raw fields.
    """

    __test__ = False  # not a pytest class

    kind: str
    d: int
    amplitude: float = 1.0
    center: tuple = ()
    width: float = 0.0
    lam: float = 0.0
    radius: float = 0.0
    lo: tuple = ()
    hi: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.amplitude < 0:
            raise ValueError("test functions are non-negative")
        if not self.center:
            object.__setattr__(self, "center", (0.0,) * self.d)
        if len(self.center) != self.d:
            raise ValueError("center has wrong dimension")

    # constructors ------------------------------------------------------
    @classmethod
    def exponential(cls, d, lam, amplitude=1.0, center=None):
        """``amplitude * exp(-lam |x - center|)``: the reference functions phi_lambda."""
        if lam <= 0:
            raise ValueError("lam must be positive")
        return cls("exponential", d, float(amplitude), _tup(center, d), lam=float(lam))

    @classmethod
    def gaussian(cls, d, width, amplitude=1.0, center=None):
        """``amplitude * exp(-|x - center|^2 / (2 width^2))``."""
        if width <= 0:
            raise ValueError("width must be positive")
        return cls("gaussian", d, float(amplitude), _tup(center, d), width=float(width))

    @classmethod
    def mollified(cls, d, radius, width, amplitude=1.0, center=None):
        """Indicator of ``B(center, radius)`` smoothed by a Gaussian of std ``width``."""
        if radius <= 0 or width <= 0:
            raise ValueError("radius and width must be positive")
        return cls("mollified", d, float(amplitude), _tup(center, d), width=float(width),
                   radius=float(radius))

    @classmethod
    def constant(cls, d, theta):
        """Constant ``theta``; only meaningful on a torus."""
        return cls("constant", d, float(theta))

    @classmethod
    def box(cls, lo, hi, amplitude=1.0):
        """``amplitude`` times the indicator of an axis-aligned box (sampler checks only)."""
        lo = tuple(float(v) for v in np.atleast_1d(lo))
        hi = tuple(float(v) for v in np.atleast_1d(hi))
        if len(lo) != len(hi) or any(b < a for a, b in zip(lo, hi)):
            raise ValueError("bad box")
        return cls("box", len(lo), float(amplitude), lo=lo, hi=hi)

    # evaluation --------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ValueError(f"points must have trailing dimension {self.d}")
        a = self.amplitude
        if self.kind == "constant":
            return np.full(x.shape[:-1], a)
        if self.kind == "box":
            inside = np.all((x >= np.array(self.lo)) & (x <= np.array(self.hi)), axis=-1)
            return a * inside.astype(float)
        r2 = np.sum((x - np.array(self.center)) ** 2, axis=-1)
        if self.kind == "exponential":
            return a * np.exp(-self.lam * np.sqrt(r2))
        if self.kind == "gaussian":
            return a * np.exp(-r2 / (2 * self.width ** 2))
        return a * _smoothed_ball(r2, self.radius, self.width ** 2, self.d)

    def on_lattice(self, lattice) -> np.ndarray:
        return self(lattice.points())

    @property
    def has_heat_flow(self) -> bool:
        return self.kind in ("gaussian", "mollified", "constant")

    def heat_flow(self, t: float, x) -> np.ndarray:
        """``S_t phi (x)`` in closed form on R^d (constant kind: on the torus)."""
        if t < 0:
            return np.zeros(np.asarray(x).shape[:-1])
        if t == 0:
            return self(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return self(x)
        r2 = np.sum((x - np.array(self.center)) ** 2, axis=-1)
        v = self.width ** 2 + t
        if self.kind == "gaussian":
            return self.amplitude * (self.width ** 2 / v) ** (self.d / 2) * np.exp(-r2 / (2 * v))
        if self.kind == "mollified":
            return self.amplitude * _smoothed_ball(r2, self.radius, v, self.d)
        raise NotImplementedError(f"no closed-form heat flow for kind {self.kind!r}")

    def domination(self, lam: float = 1.0) -> tuple[float, float] | None:
        """Constants ``(C, lam)`` with ``phi <= C exp(-lam |x|)``; None on the torus."""
        if self.kind == "constant":
            return None
        c0 = float(np.linalg.norm(self.center))
        a = self.amplitude
        if self.kind == "exponential":
            lam = min(lam, self.lam)
            return a * math.exp(lam * c0), lam
        if self.kind == "gaussian":
            return a * math.exp(lam ** 2 * self.width ** 2 / 2 + lam * c0), lam
        if self.kind == "box":
            far = float(np.max(np.linalg.norm(np.array(np.meshgrid(*zip(self.lo, self.hi))).reshape(self.d, -1), axis=0)))
            return a * math.exp(lam * far), lam
        r = np.linspace(0.0, self.radius + 40 * self.width + 40 / lam, 20001)
        prof = _smoothed_ball(r ** 2, self.radius, self.width ** 2, self.d)
        return a * float(np.max(prof * np.exp(lam * r))) * 1.01 * math.exp(lam * c0), lam

    # integrals ----------------------------------------------------------
    def integral_power(self, gamma: float, lo=None, hi=None, n: int | None = None) -> float:
        """``int phi^gamma`` over the box ``[lo, hi]`` (all of R^d when omitted)."""
        if self.amplitude == 0:
            return 0.0
        lo, hi = self._region(lo, hi)
        if self.kind == "gaussian":
            s = self.width / math.sqrt(gamma)
            return self.amplitude ** gamma * _gauss_box(self.center, s, lo, hi)
        if self.kind in ("box", "constant"):
            return self.amplitude ** gamma * _overlap(self, lo, hi)
        return midpoint_integral(lambda x: self(x) ** gamma, lo, hi, n or default_points(self.d))

    def integral(self, lo=None, hi=None, n: int | None = None) -> float:
        return self.integral_power(1.0, lo, hi, n)

    def support_box(self, mass_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
        """A box outside of which the function is below ``mass_tol`` relative."""
        c = np.array(self.center)
        if self.kind == "box":
            return np.array(self.lo), np.array(self.hi)
        if self.kind == "constant":
            raise ValueError("constant test function has no bounded support")
        if self.kind == "exponential":
            r = -math.log(mass_tol) / self.lam
        elif self.kind == "gaussian":
            r = self.width * math.sqrt(-2 * math.log(mass_tol))
        else:
            r = self.radius + self.width * math.sqrt(-2 * math.log(mass_tol)) + self.width * self.d
        return c - r, c + r

    def _region(self, lo, hi):
        if lo is None or hi is None:
            slo, shi = self.support_box(1e-14)
            lo = slo if lo is None else lo
            hi = shi if hi is None else hi
        return np.broadcast_to(np.asarray(lo, float), (self.d,)), np.broadcast_to(np.asarray(hi, float), (self.d,))

    def scaled(self, factor: float) -> "TestFunction":
        """``factor * phi``."""
        return _replace(self, amplitude=self.amplitude * factor)

    def dilated(self, k: float) -> "TestFunction":
        """``x -> phi(x / k)``."""
        c = tuple(k * v for v in self.center)
        if self.kind == "exponential":
            return _replace(self, center=c, lam=self.lam / k)
        if self.kind == "gaussian":
            return _replace(self, center=c, width=self.width * k)
        if self.kind == "mollified":
            return _replace(self, center=c, width=self.width * k, radius=self.radius * k)
        if self.kind == "box":
            return _replace(self, lo=tuple(k * v for v in self.lo), hi=tuple(k * v for v in self.hi))
        return self


def _replace(tf, **kw):
    return replace(tf, **kw)


def _tup(c, d):
    if c is None:
        return (0.0,) * d
    c = tuple(float(v) for v in np.atleast_1d(c))
    if len(c) == 1 and d > 1:
        c = c * d
    return c


def _smoothed_ball(r2, radius, var, d):
    # P(|y + sqrt(var) Z| <= radius) for |y|^2 = r2
    return stats.ncx2.cdf(radius ** 2 / var, d, np.asarray(r2) / var)


def _gauss_box(center, s, lo, hi):
    out = 1.0
    for c, a, b in zip(center, lo, hi):
        out *= s * math.sqrt(math.pi / 2) * (special.erf((b - c) / (s * math.sqrt(2)))
                                             - special.erf((a - c) / (s * math.sqrt(2))))
    return float(out)


def _overlap(tf, lo, hi):
    if tf.kind == "constant":
        return float(np.prod(np.asarray(hi) - np.asarray(lo)))
    a = np.maximum(np.array(tf.lo), lo)
    b = np.minimum(np.array(tf.hi), hi)
    return float(np.prod(np.clip(b - a, 0, None)))


def default_points(d):
    return {1: 4000, 2: 600, 3: 120, 4: 40, 5: 20}.get(d, 12)


def midpoint_integral(f, lo, hi, n):
    d = len(lo)
    h = (np.asarray(hi) - np.asarray(lo)) / n
    axes = [lo[i] + h[i] * (np.arange(n) + 0.5) for i in range(d)]
    total = 0.0
    # chunk along the first axis to bound memory
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, d - 1) if d > 1 else None
    for x0 in axes[0]:
        if rest is None:
            pts = np.array([[x0]])
        else:
            pts = np.concatenate([np.full((rest.shape[0], 1), x0), rest], axis=1)
        total += float(np.sum(f(pts)))
    return total * float(np.prod(h))
