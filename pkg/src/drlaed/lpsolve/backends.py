"""Pluggable solver backends.

Anything with a ``solve(lp, settings) -> LpSolution`` method can be handed
to :func:`~drlaed.lpsolve.solve_lp` or to the dispatch layer.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpSettings, LpSolution


class LpBackend(Protocol):
    def solve(self, lp: LinearProgram, settings: LpSettings) -> LpSolution: ...


class InternalBackend:
    """The bundled bounded-variable revised simplex."""

    def solve(self, lp, settings=None):
        from .solve import solve_lp

        return solve_lp(lp, settings)


class HighsBackend:
    """Route problems to HiGHS through :func:`scipy.optimize.linprog`.

    Useful for cross-checking; duals follow the same sign convention as the
    internal solver.
    """

    def solve(self, lp, settings=None):
        from scipy.optimize import linprog

        from .solve import certify

        res = linprog(
            lp.c,
            A_ub=lp.A_ub if lp.n_ub else None,
            b_ub=lp.b_ub if lp.n_ub else None,
            A_eq=lp.A_eq if lp.n_eq else None,
            b_eq=lp.b_eq if lp.n_eq else None,
            bounds=list(zip(np.where(np.isfinite(lp.lb), lp.lb, None), np.where(np.isfinite(lp.ub), lp.ub, None))),
            method="highs",
        )
        if res.status == 2:
            return LpSolution(INFEASIBLE, path="highs")
        if res.status == 3:
            return LpSolution(UNBOUNDED, path="highs")
        if res.status != 0:
            return LpSolution(res.message, path="highs")
        x = res.x
        y_ub = -res.ineqlin.marginals if lp.n_ub else np.zeros(0)
        y_eq = res.eqlin.marginals if lp.n_eq else np.zeros(0)
        sol = LpSolution(OPTIMAL, x=x, objective=float(lp.c @ x), y_ub=y_ub, y_eq=y_eq,
                         iterations=int(getattr(res, "nit", 0)), path="highs")
        sol.primal_residual, sol.dual_residual, sol.gap, _ = certify(lp, x, y_ub, y_eq)
        return sol
