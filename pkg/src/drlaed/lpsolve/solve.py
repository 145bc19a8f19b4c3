"""Top-level LP entry point: path selection, status mapping, certification.

Two algorithmic paths share the bounded simplex core:

* ``primal`` adds a slack per inequality row and runs the simplex on the
  resulting equality form (basis dimension = number of rows);
* ``dual`` runs the simplex on the LP dual, whose equality rows are the
  primal variables (basis dimension = number of variables). The primal
  solution is read off the simplex multipliers.

Sample-based dispatch programs have many more rows than variables, so
``auto`` picks the dual path whenever rows outnumber variables.
"""

from __future__ import annotations

import logging

import numpy as np

from ..errors import NumericalBreakdown
from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, LpSettings, LpSolution
from .simplex import bounded_simplex

logger = logging.getLogger(__name__)


def certify(lp: LinearProgram, x, y_ub, y_eq):
    """Relative primal residual, dual residual, duality gap and dual objective.

    The bound multipliers are recovered from the reduced costs
    ``d = c + A_ub'y_ub - A_eq'y_eq``; a reduced cost pushing against an
    infinite bound counts as dual infeasibility.
    """
    scale_p = 1.0 + max(np.abs(lp.b_ub).max(initial=0.0), np.abs(lp.b_eq).max(initial=0.0),
                        np.abs(x).max(initial=0.0))
    viol = 0.0
    if lp.n_ub:
        viol = max(viol, np.max(lp.A_ub @ x - lp.b_ub, initial=0.0))
    if lp.n_eq:
        viol = max(viol, np.abs(lp.A_eq @ x - lp.b_eq).max())
    viol = max(viol, np.max(lp.lb - x, initial=0.0), np.max(x - lp.ub, initial=0.0))
    primal_res = viol / scale_p

    d = lp.c + lp.A_ub.T @ y_ub - lp.A_eq.T @ y_eq
    r = np.maximum(d, 0.0)
    s = np.maximum(-d, 0.0)
    scale_d = 1.0 + max(np.abs(lp.c).max(initial=0.0), np.abs(y_ub).max(initial=0.0),
                        np.abs(y_eq).max(initial=0.0))
    dual_viol = max(np.max(-y_ub, initial=0.0),
                    np.max(r[~np.isfinite(lp.lb)], initial=0.0),
                    np.max(s[~np.isfinite(lp.ub)], initial=0.0))
    dual_res = dual_viol / scale_d

    fl = np.isfinite(lp.lb)
    fu = np.isfinite(lp.ub)
    dual_obj = (lp.b_eq @ y_eq - lp.b_ub @ y_ub + lp.lb[fl] @ r[fl] - lp.ub[fu] @ s[fu])
    primal_obj = lp.c @ x
    gap = abs(primal_obj - dual_obj) / (1.0 + abs(primal_obj))
    return primal_res, dual_res, gap, dual_obj


def _solve_primal(lp: LinearProgram, settings: LpSettings) -> LpSolution:
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    M = np.zeros((m1 + m2, n + m1))
    M[:m1, :n] = lp.A_ub
    M[:m1, n:] = np.eye(m1)
    M[m1:, :n] = lp.A_eq
    q = np.concatenate([lp.b_ub, lp.b_eq])
    g = np.concatenate([lp.c, np.zeros(m1)])
    lo = np.concatenate([lp.lb, np.zeros(m1)])
    hi = np.concatenate([lp.ub, np.full(m1, np.inf)])
    res = bounded_simplex(M, q, g, lo, hi, settings)
    if res.status != OPTIMAL:
        return LpSolution(res.status, iterations=res.iterations, path="primal")
    x = res.v[:n]
    y_ub = -res.pi[:m1]
    y_eq = res.pi[m1:]
    return LpSolution(OPTIMAL, x=x, objective=float(lp.c @ x), y_ub=y_ub, y_eq=y_eq,
                      reduced_costs=res.d[:n], iterations=res.iterations, path="primal")


def _dual_data(lp: LinearProgram, cost):
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    fl = np.flatnonzero(np.isfinite(lp.lb))
    fu = np.flatnonzero(np.isfinite(lp.ub))
    ncol = m1 + m2 + fl.size + fu.size
    M = np.zeros((n, ncol))
    M[:, :m1] = -lp.A_ub.T
    M[:, m1:m1 + m2] = lp.A_eq.T
    M[fl, m1 + m2 + np.arange(fl.size)] = 1.0
    M[fu, m1 + m2 + fl.size + np.arange(fu.size)] = -1.0
    g = np.concatenate([lp.b_ub, -lp.b_eq, -lp.lb[fl], lp.ub[fu]])
    lo = np.concatenate([np.zeros(m1), np.full(m2, -np.inf), np.zeros(fl.size + fu.size)])
    hi = np.full(ncol, np.inf)
    return M, np.asarray(cost, dtype=float), g, lo, hi


def _solve_dual(lp: LinearProgram, settings: LpSettings) -> LpSolution:
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    M, q, g, lo, hi = _dual_data(lp, lp.c)
    res = bounded_simplex(M, q, g, lo, hi, settings)
    iters = res.iterations
    if res.status == UNBOUNDED:
        return LpSolution(INFEASIBLE, iterations=iters, path="dual")
    if res.status == INFEASIBLE:
        # dual infeasible: primal is unbounded if it is feasible at all
        feas = bounded_simplex(M, np.zeros(n), g, lo, hi, settings)
        iters += feas.iterations
        status = INFEASIBLE if feas.status == UNBOUNDED else UNBOUNDED
        return LpSolution(status, iterations=iters, path="dual")
    x = -res.pi
    y_ub = res.v[:m1]
    y_eq = res.v[m1:m1 + m2]
    d = lp.c + lp.A_ub.T @ y_ub - lp.A_eq.T @ y_eq
    return LpSolution(OPTIMAL, x=x, objective=float(lp.c @ x), y_ub=y_ub, y_eq=y_eq,
                      reduced_costs=d, iterations=iters, path="dual")


def _pick_path(lp: LinearProgram, settings: LpSettings) -> str:
    if settings.path in ("primal", "dual"):
        return settings.path
    return "dual" if lp.n_rows > lp.n_vars else "primal"


def solve_lp(lp: LinearProgram, settings: LpSettings | None = None, backend=None) -> LpSolution:
    """Solve ``lp`` and return a certified :class:`LpSolution`.

    Parameters
    ----------
    lp : LinearProgram
    settings : LpSettings, optional
        Tolerances and path selection.
    backend : object with ``solve(lp, settings)``, optional
        Replacement solver; the internal simplex is used when omitted.

    Raises
    ------
    NumericalBreakdown
        If factorization fails or an optimum cannot be certified on either
        algorithmic path, or the iteration cap is hit.
    """
    settings = settings or LpSettings()
    if backend is not None:
        return backend.solve(lp, settings)

    first = _pick_path(lp, settings)
    paths = [first] if settings.path in ("primal", "dual") else [first, "primal" if first == "dual" else "dual"]
    failure = None
    verdict = None
    for path in paths:
        try:
            sol = _solve_primal(lp, settings) if path == "primal" else _solve_dual(lp, settings)
        except NumericalBreakdown as exc:
            logger.warning("%s path broke down: %s", path, exc)
            failure = exc
            continue
        if sol.status != OPTIMAL:
            if len(paths) == 1 or path != first:
                return sol
            # infeasible/unbounded verdicts carry no certificate: confirm on the other path
            verdict = sol
            continue
        p, dres, gap, _ = certify(lp, sol.x, sol.y_ub, sol.y_eq)
        sol.primal_residual, sol.dual_residual, sol.gap = p, dres, gap
        if max(p, dres, gap) <= settings.cert_tol:
            return sol
        logger.warning("%s path failed certification (primal %.2e, dual %.2e, gap %.2e)",
                       path, p, dres, gap)
        failure = NumericalBreakdown(
            f"optimum failed certification on {path} path (primal {p:.2e}, dual {dres:.2e}, gap {gap:.2e})")
    if verdict is not None:
        return verdict
    raise failure
