"""Containers for linear programs, solver settings and solutions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, InputError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpSettings:
    """Tolerances and algorithmic switches for the internal simplex solver.

    ``feas_tol``/``opt_tol`` are used while pivoting (on the scaled
    problem); ``cert_tol`` is the relative threshold a returned optimum must
    meet on primal residual, dual residual and duality gap.
    """

    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    pivot_tol: float = 1e-9
    cert_tol: float = 1e-7
    refactor_every: int = 50
    stall_threshold: int = 40
    max_iter: int | None = None
    path: str = "auto"
    scaling: bool = True

    def iteration_cap(self, m: int, n: int) -> int:
        if self.max_iter is not None:
            return self.max_iter
        return 1000 + 50 * (m + n)


def _as_matrix(a, ncols, name):
    if a is None:
        return np.zeros((0, ncols))
    if hasattr(a, "toarray"):
        a = a.toarray()
    a = np.asarray(a, dtype=float)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, ncols)
    if a.ndim != 2 or a.shape[1] != ncols:
        raise DimensionMismatch(f"{name} has shape {a.shape}, expected (*, {ncols})")
    return a


def _as_vector(v, size, name, fill=0.0):
    if v is None:
        return np.full(size, fill)
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size == 1 and size != 1:
        v = np.full(size, float(v[0]))
    if v.size != size:
        raise DimensionMismatch(f"{name} has length {v.size}, expected {size}")
    return v


@dataclass
class LinearProgram:
    """``min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lb <= x <= ub``.

    ``groups`` maps a block name to a half-open ``(start, stop)`` range of
    ``A_ub`` rows; builders use it to label e.g. the sample-dependent rows.
    Variable bounds default to ``(-inf, inf)``.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None
    var_names: list[str] | None = None
    row_names_ub: list[str] | None = None
    row_names_eq: list[str] | None = None
    groups: dict[str, tuple[int, int]] = field(default_factory=dict)
    var_groups: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A_ub = _as_matrix(self.A_ub, n, "A_ub")
        self.A_eq = _as_matrix(self.A_eq, n, "A_eq")
        self.b_ub = _as_vector(self.b_ub, self.A_ub.shape[0], "b_ub")
        self.b_eq = _as_vector(self.b_eq, self.A_eq.shape[0], "b_eq")
        self.lb = _as_vector(self.lb, n, "lb", fill=-np.inf)
        self.ub = _as_vector(self.ub, n, "ub", fill=np.inf)
        if not np.all(np.isfinite(self.c)):
            raise InputError("objective coefficients must be finite")
        for name in ("A_ub", "b_ub", "A_eq", "b_eq"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InputError(f"{name} contains NaN or infinite entries")
        if np.any(np.isnan(self.lb)) or np.any(np.isnan(self.ub)):
            raise InputError("variable bounds contain NaN")
        if np.any(self.lb == np.inf) or np.any(self.ub == -np.inf):
            raise InputError("variable bounds must not be +inf (lower) or -inf (upper)")
        if self.var_names is not None and len(self.var_names) != n:
            raise DimensionMismatch("var_names length does not match c")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_ub(self) -> int:
        return self.A_ub.shape[0]

    @property
    def n_eq(self) -> int:
        return self.A_eq.shape[0]

    @property
    def n_rows(self) -> int:
        return self.n_ub + self.n_eq

    def group_size(self, name: str) -> int:
        start, stop = self.groups.get(name, (0, 0))
        return stop - start


@dataclass
class LpSolution:
    """Result of :func:`~drlaed.lpsolve.solve_lp`.

    Duals follow the Lagrangian convention ``c + A_ub'y_ub - A_eq'y_eq =
    reduced_costs`` with ``y_ub >= 0``. Residuals are relative and only
    meaningful when ``status == "optimal"``.
    """

    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    y_ub: np.ndarray | None = None
    y_eq: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    gap: float = np.nan
    iterations: int = 0
    path: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL
