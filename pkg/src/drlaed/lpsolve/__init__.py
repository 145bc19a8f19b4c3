"""Self-contained dense linear programming."""

from .backends import HighsBackend, InternalBackend, LpBackend
from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpSettings, LpSolution
from .mps import to_mps, write_mps
from .solve import certify, solve_lp

__all__ = [
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "HighsBackend",
    "InternalBackend",
    "LinearProgram",
    "LpBackend",
    "LpSettings",
    "LpSolution",
    "certify",
    "solve_lp",
    "to_mps",
    "write_mps",
]
