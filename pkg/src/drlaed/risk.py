"""Empirical CVaR and the Wasserstein distributionally robust CVaR program.

The DR-CVaR constraint ``sup_P inf_t [E_P (Z + t)_+ / alpha - t] <= 0``
over a type-1 Wasserstein ball of radius ``theta`` around the empirical
distribution is rewritten as linear rows in ``(x, lam, t, s, eta)``:

    lam * theta + mean(s) <= t * alpha
    d_k'x - f_k + t + (e_k - G'eta_ik)'w_i + eta_ik'h <= s_i
    ||e_k - G'eta_ik||_* <= lam,   eta_ik >= 0,  s_i >= 0,  lam >= 0

``||.||_*`` is the dual of the ground metric on the uncertainty space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyInput, InputError, UnsupportedNorm
from .lpsolve import LinearProgram
from .problem import CompactProblem

SUPPORT_TOL = 1e-9

_NORMS = {"linf": "linf", "inf": "linf", "l_inf": "linf", "max": "linf",
          "l1": "l1", "1": "l1", "l_1": "l1"}


def normalize_norm(name: str) -> str:
    try:
        return _NORMS[str(name).lower()]
    except KeyError:
        raise UnsupportedNorm(f"ground metric {name!r} is not one of l1, linf") from None


def dual_norm(v, ground_norm: str):
    """Dual norm of ``v`` along the last axis: l1 for an linf ground metric
    and linf for an l1 ground metric."""
    v = np.abs(np.asarray(v, dtype=float))
    if normalize_norm(ground_norm) == "linf":
        return v.sum(axis=-1)
    return v.max(axis=-1, initial=0.0)


@dataclass
class AmbiguitySpec:
    """Wasserstein ball parameters and an optional polyhedral support
    ``{w : G w <= h}``."""

    theta: float
    alpha: float
    ground_norm: str = "linf"
    G: np.ndarray | None = None
    h: np.ndarray | None = None

    def __post_init__(self):
        self.theta = float(self.theta)
        self.alpha = float(self.alpha)
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.theta >= 0.0:
            raise InputError(f"theta must be nonnegative, got {self.theta}")
        self.ground_norm = normalize_norm(self.ground_norm)
        if (self.G is None) != (self.h is None):
            raise InputError("support needs both G and h")
        if self.G is not None:
            self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
            self.h = np.asarray(self.h, dtype=float).reshape(-1)
            if self.G.shape[0] != self.h.size:
                raise DimensionMismatch("support G and h disagree on the number of rows")

    @property
    def has_support(self) -> bool:
        return self.G is not None

    def check_samples(self, samples: np.ndarray) -> None:
        if not self.has_support:
            return
        if self.G.shape[1] != samples.shape[1]:
            raise DimensionMismatch("support G does not match the sample dimension")
        excess = samples @ self.G.T - self.h
        if np.any(excess > SUPPORT_TOL):
            i = int(np.argmax(excess.max(axis=1)))
            raise InputError(f"sample {i} lies outside the declared support")


@dataclass
class SampleSet:
    """``N x n_omega`` matrix of nonnegative renewable scenarios (MW)."""

    samples: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if self.samples.shape[0] < 1:
            raise EmptyInput("a sample set needs at least one scenario")
        if not np.all(np.isfinite(self.samples)):
            raise InputError("samples must be finite")
        if np.any(self.samples < 0):
            raise InputError("renewable samples must be nonnegative")
        if not self.labels:
            self.labels = [f"w{j}" for j in range(self.samples.shape[1])]
        if len(self.labels) != self.samples.shape[1]:
            raise DimensionMismatch("one label per sample component is required")

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def n_omega(self) -> int:
        return self.samples.shape[1]

    def subset(self, rows) -> "SampleSet":
        return SampleSet(self.samples[rows], list(self.labels))


def empirical_cvar(values, alpha: float) -> float:
    """``inf_t [mean((v - t)_+) / alpha + t]`` by scanning the sample breakpoints."""
    v = np.sort(np.asarray(values, dtype=float).reshape(-1))
    if v.size == 0:
        raise EmptyInput("empirical CVaR of an empty sample")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    excess = np.maximum(v[None, :] - v[:, None], 0.0).mean(axis=1)
    return float(np.min(excess / alpha + v))


def drcvp_size(n_x: int, K: int, m_det: int, N: int, n_omega: int = 0, support_rows: int = 0,
               ground_norm: str = "linf") -> dict:
    """Variable and row counts of :func:`build_drcvp` without building it."""
    gn = normalize_norm(ground_norm)
    n_vars = n_x + 2 + N + N * K * support_rows
    rows = m_det + 1 + N * K
    if support_rows:
        if gn == "linf":
            n_vars += N * K * n_omega
            rows += N * K * (2 * n_omega + 1)
        else:
            rows += N * K * 2 * n_omega
    return {"variables": n_vars, "constraints": rows, "uncertain_rows": N * K}


def build_drcvp(compact: CompactProblem, samples: SampleSet, amb: AmbiguitySpec) -> LinearProgram:
    """Linear program for dispatch under a Wasserstein DR-CVaR constraint.

    Variables are ordered ``x, lam, t, s_1..s_N`` followed, when a support
    polytope is given, by ``eta_ik`` (``(i, k)`` lexicographic) and, for an
    linf ground metric, the auxiliary vectors that linearize the l1 dual
    norm. Without a support the dual-norm rows collapse to the lower bound
    ``lam >= max_k ||e_k||_*``.

    The ``uncertain`` row group holds the ``N * K`` sample rows.
    """
    W = samples.samples
    N, n_w = W.shape
    if n_w != compact.n_omega:
        raise DimensionMismatch(f"samples have {n_w} components, problem expects {compact.n_omega}")
    amb.check_samples(W)
    n_x, K = compact.n_x, compact.K
    A_det, b_det = compact.deterministic_rows()
    m_det = A_det.shape[0]
    r = amb.G.shape[0] if amb.has_support else 0
    aux = amb.has_support and amb.ground_norm == "linf"

    i_lam = n_x
    i_t = n_x + 1
    i_s = n_x + 2
    i_eta = i_s + N
    i_aux = i_eta + N * K * r
    n_vars = i_aux + (N * K * n_w if aux else 0)

    c = np.zeros(n_vars)
    c[:n_x] = compact.c
    lb = np.full(n_vars, -np.inf)
    ub = np.full(n_vars, np.inf)
    lb[i_lam] = 0.0
    lb[i_s:i_s + N] = 0.0
    lb[i_eta:n_vars] = 0.0
    if not amb.has_support:
        lb[i_lam] = float(dual_norm(compact.E, amb.ground_norm).max(initial=0.0))

    n_norm_rows = 0
    if amb.has_support:
        n_norm_rows = N * K * (2 * n_w + 1 if aux else 2 * n_w)
    n_rows = m_det + 1 + N * K + n_norm_rows
    A = np.zeros((n_rows, n_vars))
    b = np.zeros(n_rows)

    A[:m_det, :n_x] = A_det
    b[:m_det] = b_det

    row = m_det
    A[row, i_lam] = amb.theta
    A[row, i_t] = -amb.alpha
    A[row, i_s:i_s + N] = 1.0 / N
    row += 1

    u0 = row
    ks = np.arange(K)
    for i in range(N):
        blk = slice(u0 + i * K, u0 + (i + 1) * K)
        A[blk, :n_x] = compact.D
        A[blk, i_t] = 1.0
        A[blk, i_s + i] = -1.0
        b[blk] = compact.f - compact.E @ W[i]
        if r:
            slack_i = amb.h - amb.G @ W[i]
            rows_i = u0 + i * K + ks
            for q in range(r):
                A[rows_i, i_eta + (i * K + ks) * r + q] = slack_i[q]
    row = u0 + N * K

    if amb.has_support:
        Gt = amb.G.T
        for i in range(N):
            for k in range(K):
                eta = slice(i_eta + (i * K + k) * r, i_eta + (i * K + k + 1) * r)
                e_k = compact.E[k]
                lo = slice(row, row + n_w)
                hi = slice(row + n_w, row + 2 * n_w)
                A[lo, eta] = -Gt
                A[hi, eta] = Gt
                b[lo] = -e_k
                b[hi] = e_k
                if aux:
                    u = slice(i_aux + (i * K + k) * n_w, i_aux + (i * K + k + 1) * n_w)
                    A[lo, u] = -np.eye(n_w)
                    A[hi, u] = -np.eye(n_w)
                    A[row + 2 * n_w, u] = 1.0
                    A[row + 2 * n_w, i_lam] = -1.0
                    row += 2 * n_w + 1
                else:
                    A[lo, i_lam] = -1.0
                    A[hi, i_lam] = -1.0
                    row += 2 * n_w

    groups = {
        "deterministic": (0, m_det),
        "cvar": (m_det, m_det + 1),
        "uncertain": (u0, u0 + N * K),
        "dual_norm": (u0 + N * K, n_rows),
    }
    var_groups = {"x": (0, n_x), "lam": (i_lam, i_lam + 1), "t": (i_t, i_t + 1),
                  "s": (i_s, i_s + N), "eta": (i_eta, i_aux), "aux": (i_aux, n_vars)}
    return LinearProgram(c=c, A_ub=A, b_ub=b, lb=lb, ub=ub, groups=groups, var_groups=var_groups)
