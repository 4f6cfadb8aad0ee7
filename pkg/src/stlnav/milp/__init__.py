"""Exact mixed-integer linear programming, built from first principles.

``MilpModel`` collects variables, constraints, and a minimization
objective; ``solve_lp`` runs the bounded-variable primal simplex on
the continuous relaxation; ``solve_milp`` wraps it in best-bound
branch and bound over the binaries; ``dump_lp`` writes a model in LP
format for debugging.
"""

from .branch_bound import GAP_TOL, INT_TOL, solve_milp
from .model import (
    MilpModel,
    MilpSolution,
    SolveStats,
    Status,
    dump_lp,
)
from .simplex import FEAS_TOL, solve_arrays, solve_lp

__all__ = [
    "MilpModel",
    "MilpSolution",
    "SolveStats",
    "Status",
    "dump_lp",
    "solve_lp",
    "solve_milp",
    "solve_arrays",
    "FEAS_TOL",
    "INT_TOL",
    "GAP_TOL",
]
