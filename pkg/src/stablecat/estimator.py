from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

# wall time is deliberately not a CSV column: CSV output must be byte-reproducible
CSV_FIELDS = ("name", "value", "se", "n", "seed")


@dataclass(frozen=True)
class EstimatorResult:
    """Monte Carlo output: point estimate, standard error and provenance."""

    value: float
    se: float
    n: int
    seed: int | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_samples(cls, samples, seed=None, started=None, **extra) -> "EstimatorResult":
        x = np.asarray(samples, dtype=float).ravel()
        n = x.size
        if n == 0:
            raise ValueError("no samples")
        mean = float(np.sum(x) / n)
        se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        wall = 0.0 if started is None else time.perf_counter() - started
        return cls(mean, se, n, seed, wall, dict(extra))

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.value - target) <= n_se * self.se

    def scaled(self, factor: float) -> "EstimatorResult":
        return EstimatorResult(self.value * factor, self.se * abs(factor), self.n, self.seed,
                               self.wall_time, dict(self.extra))

    def row(self, name: str) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["name"] = name
        return {k: d[k] for k in CSV_FIELDS}


def combined_se(a: EstimatorResult, b: EstimatorResult) -> float:
    return math.hypot(a.se, b.se)


def results_to_csv(rows: dict[str, EstimatorResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for name, res in rows.items():
        w.writerow({k: _fmt(v) for k, v in res.row(name).items()})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v
