"""Master programs for the dispatch methods and a common solve entry point.

Methods
-------
deterministic-oracle
    Dispatch against one known renewable realization.
scenario / worst-case
    Enforce the uncertain rows at every sample (the worst-case baseline is
    the same program built over the whole ensemble).
drcvp
    Wasserstein DR-CVaR program from :mod:`drlaed.risk`.
drccp-robust
    Robust counterpart over the per-component box from :mod:`drlaed.bounds`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import ComponentBounds, build_box
from .errors import (DimensionMismatch, Infeasible, InputError, NumericalBreakdown, SolverFailure,
                     Unbounded)
from .lpsolve import INFEASIBLE, UNBOUNDED, LinearProgram, LpSettings, solve_lp
from .problem import CompactProblem
from .risk import AmbiguitySpec, SampleSet, build_drcvp, drcvp_size

METHODS = ("deterministic-oracle", "scenario", "worst-case", "drcvp", "drccp-robust")
DR_METHODS = ("drcvp", "drccp-robust")


@dataclass
class MethodSpec:
    method: str
    ambiguity: AmbiguitySpec | None = None
    realized: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.method in DR_METHODS and self.ambiguity is None:
            raise InputError(f"method {self.method} needs an ambiguity specification")
        if self.method not in DR_METHODS and self.ambiguity is not None:
            raise InputError(f"method {self.method} takes no ambiguity specification")
        if self.method == "deterministic-oracle":
            if self.realized is None:
                raise InputError("the deterministic oracle needs the realized renewable output")
            self.realized = np.asarray(self.realized, dtype=float).reshape(-1)
        elif self.realized is not None:
            raise InputError(f"method {self.method} takes no realized output")


def _base(compact: CompactProblem, extra_rows: int):
    A_det, b_det = compact.deterministic_rows()
    m = A_det.shape[0]
    A = np.zeros((m + extra_rows, compact.n_x))
    b = np.zeros(m + extra_rows)
    A[:m] = A_det
    b[:m] = b_det
    return A, b, m


def _lp(compact, A, b, m, n_unc):
    groups = {"deterministic": (0, m), "uncertain": (m, m + n_unc)}
    return LinearProgram(c=compact.c, A_ub=A, b_ub=b, groups=groups, var_groups={"x": (0, compact.n_x)})


def build_deterministic(compact: CompactProblem, omega) -> LinearProgram:
    """``A x <= b`` and ``D x <= f - E w`` for a single realization ``w``."""
    omega = np.asarray(omega, dtype=float).reshape(-1)
    if omega.size != compact.n_omega:
        raise DimensionMismatch(f"realization has {omega.size} components, expected {compact.n_omega}")
    A, b, m = _base(compact, compact.K)
    A[m:] = compact.D
    b[m:] = compact.f - compact.E @ omega
    return _lp(compact, A, b, m, compact.K)


def build_scenario(compact: CompactProblem, samples: SampleSet) -> LinearProgram:
    """Enforce the uncertain rows at every sample: ``N * K`` sample rows."""
    W = samples.samples
    if W.shape[1] != compact.n_omega:
        raise DimensionMismatch(f"samples have {W.shape[1]} components, expected {compact.n_omega}")
    N, K = W.shape[0], compact.K
    A, b, m = _base(compact, N * K)
    A[m:] = np.tile(compact.D, (N, 1))
    b[m:] = (compact.f[None, :] - W @ compact.E.T).ravel()
    return _lp(compact, A, b, m, N * K)


def build_robust_master(compact: CompactProblem, box: ComponentBounds) -> LinearProgram:
    """Robust counterpart over the box ``[lower, upper]``.

    Row ``k`` is tightened by its adversarial vertex:
    ``d_k'x + max(0, e_k)'upper + min(0, e_k)'lower <= f_k``.
    """
    if box.n_omega != compact.n_omega:
        raise DimensionMismatch(f"box has {box.n_omega} components, expected {compact.n_omega}")
    E = compact.E
    worst = np.maximum(E, 0.0) @ box.upper + np.minimum(E, 0.0) @ box.lower
    A, b, m = _base(compact, compact.K)
    A[m:] = compact.D
    b[m:] = compact.f - worst
    return _lp(compact, A, b, m, compact.K)


def problem_size(method: str, n_x: int, K: int, m_det: int, N: int, n_omega: int,
                 support_rows: int = 0, ground_norm: str = "linf") -> dict:
    """Variable, row and subproblem counts of a method's master program,
    computed without building any matrix."""
    if method in ("scenario", "worst-case"):
        return {"variables": n_x, "constraints": m_det + N * K, "uncertain_rows": N * K, "subproblems": 0}
    if method == "deterministic-oracle":
        return {"variables": n_x, "constraints": m_det + K, "uncertain_rows": K, "subproblems": 0}
    if method == "drccp-robust":
        return {"variables": n_x, "constraints": m_det + K, "uncertain_rows": K, "subproblems": n_omega}
    if method == "drcvp":
        size = drcvp_size(n_x, K, m_det, N, n_omega, support_rows, ground_norm)
        size["subproblems"] = 0
        return size
    raise InputError(f"unknown method {method!r}")


@dataclass
class DispatchSolution:
    method: str
    status: str
    x: np.ndarray | None
    objective: float | None
    theta: float | None = None
    alpha: float | None = None
    timings: dict = field(default_factory=dict)
    size: dict = field(default_factory=dict)
    box: ComponentBounds | None = None
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "theta": self.theta,
            "alpha": self.alpha,
            "objective": None if self.objective is None else float(self.objective),
            "x": None if self.x is None else [float(v) for v in self.x],
            "status": self.status,
            "timings": {k: float(v) for k, v in self.timings.items()},
        }


def build_master(spec: MethodSpec, compact: CompactProblem, samples: SampleSet | None = None,
                 box: ComponentBounds | None = None, box_solver=None):
    """Master LP for ``spec``; returns ``(lp, box)`` where ``box`` is the
    component box used by ``drccp-robust`` (``None`` otherwise)."""
    m = spec.method
    if m == "deterministic-oracle":
        return build_deterministic(compact, spec.realized), None
    if samples is None and not (m == "drccp-robust" and box is not None):
        raise InputError(f"method {m} needs training samples")
    if m in ("scenario", "worst-case"):
        return build_scenario(compact, samples), None
    if m == "drcvp":
        return build_drcvp(compact, samples, spec.ambiguity), None
    if box is None:
        box = build_box(samples, spec.ambiguity, solver=box_solver)
    return build_robust_master(compact, box), box


def solve_dispatch(spec: MethodSpec, compact: CompactProblem, samples: SampleSet | None = None,
                   box: ComponentBounds | None = None, settings: LpSettings | None = None,
                   backend=None, box_solver=None) -> DispatchSolution:
    """Build and solve the master program for one method.

    Raises
    ------
    Infeasible, Unbounded
        The master program has no optimum; the exception carries the
        method name and a :class:`DispatchSolution` with the status.
    SolverFailure
        The LP solver broke down numerically.
    """
    amb = spec.ambiguity
    t0 = time.perf_counter()
    lp, box = build_master(spec, compact, samples, box, box_solver)
    t1 = time.perf_counter()
    sol = DispatchSolution(
        method=spec.method, status="", x=None, objective=None,
        theta=None if amb is None else amb.theta, alpha=None if amb is None else amb.alpha,
        size={"variables": lp.n_vars, "constraints": lp.n_rows}, box=box,
    )
    try:
        res = solve_lp(lp, settings, backend)
    except NumericalBreakdown as exc:
        sol.status = "failure"
        sol.timings = {"build": t1 - t0, "solve": time.perf_counter() - t1}
        raise SolverFailure(f"{spec.method}: {exc}", method=spec.method, solution=sol) from exc
    t2 = time.perf_counter()
    sol.timings = {"build": t1 - t0, "solve": t2 - t1}
    sol.status = res.status
    sol.iterations = res.iterations
    if res.status == INFEASIBLE:
        raise Infeasible(f"{spec.method} master program is infeasible", method=spec.method, solution=sol)
    if res.status == UNBOUNDED:
        raise Unbounded(f"{spec.method} master program is unbounded", method=spec.method, solution=sol)
    sol.x = res.x[:compact.n_x].copy()
    sol.objective = float(compact.c @ sol.x)
    return sol
