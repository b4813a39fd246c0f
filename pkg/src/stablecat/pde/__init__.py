"""Grid solvers for the scaled log-Laplace equation, its linearizations and the limit functionals."""

from .config import ScalingConfig, critical_index, variance_index
from .fields import SpaceTimeField, read_field, write_field
from .limit import fluctuation_functional, limit_residual, solve_limit_mild
from .solvers import (constant_medium_solution, heat_flow, solve_fields, solve_linearized,
                      solve_scaled_loglaplace)

__all__ = [
    "ScalingConfig", "SpaceTimeField", "constant_medium_solution", "critical_index",
    "fluctuation_functional", "heat_flow", "limit_residual", "read_field", "solve_fields",
    "solve_limit_mild", "solve_linearized", "solve_scaled_loglaplace", "variance_index", "write_field",
]
