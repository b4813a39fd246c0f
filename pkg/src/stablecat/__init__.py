"""Super-Brownian motion in a stable random catalyst: simulation and scaling checks."""

__version__ = "0.1.0"

from stablecat.estimator import EstimatorResult
from stablecat.lattice import Lattice

__all__ = ["EstimatorResult", "Lattice", "__version__"]
