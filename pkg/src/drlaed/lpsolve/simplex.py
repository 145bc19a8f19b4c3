"""Bounded-variable revised simplex on ``min g'v, M v = q, lo <= v <= hi``.

The basis inverse is represented by a dense LU factorization (partial
pivoting) followed by a product-form eta file, refactorized every
``refactor_every`` pivots. Pricing is scaled Dantzig; after
``stall_threshold`` consecutive degenerate pivots the solver falls back to
Bland's rule until the objective moves again. Phase 1 minimizes the sum of
artificial variables, with unit columns crashed into the starting basis
whenever they can absorb the initial residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..errors import NumericalBreakdown
from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, LpSettings

logger = logging.getLogger(__name__)

BASIC, AT_LOWER, AT_UPPER, FREE, FIXED = 0, 1, 2, 3, 4


@dataclass
class SimplexResult:
    status: str
    v: np.ndarray
    pi: np.ndarray
    d: np.ndarray
    iterations: int
    infeasibility: float = 0.0


def _pow2(x):
    return np.exp2(np.round(np.log2(x)))


def equilibrate(M, passes=2, drop=1e-10):
    """Geometric row/column scaling factors (powers of two) for ``M``.

    Entries below ``drop`` times the largest magnitude are ignored so that
    round-off noise cannot drive the factors to extremes.
    """
    m, n = M.shape
    r = np.ones(m)
    c = np.ones(n)
    absM = np.abs(M)
    nz = absM > drop * absM.max(initial=0.0)
    for _ in range(passes):
        S = absM * r[:, None] * c[None, :]
        big = np.where(nz, S, 0.0).max(axis=1, initial=0.0)
        small = np.where(nz, S, np.inf).min(axis=1, initial=np.inf)
        ok = (big > 0) & np.isfinite(small)
        r[ok] /= _pow2(np.sqrt(big[ok] * small[ok]))
        S = absM * r[:, None] * c[None, :]
        big = np.where(nz, S, 0.0).max(axis=0, initial=0.0)
        small = np.where(nz, S, np.inf).min(axis=0, initial=np.inf)
        ok = (big > 0) & np.isfinite(small)
        c[ok] /= _pow2(np.sqrt(big[ok] * small[ok]))
    return r, c


class _Factor:
    """Dense LU of a basis matrix plus product-form updates."""

    def __init__(self, Bmat):
        m = Bmat.shape[0]
        self.m = m
        self.etas = []
        if m == 0:
            self.lu = None
            return
        with np.errstate(all="ignore"):
            lu, piv = lu_factor(Bmat, check_finite=False)
        diag = np.abs(np.diag(lu))
        if not np.all(np.isfinite(lu)) or diag.min() <= 1e-13 * max(diag.max(), 1.0):
            raise NumericalBreakdown("basis matrix is numerically singular")
        self.lu = (lu, piv)

    def ftran(self, a):
        if self.m == 0:
            return np.zeros(0)
        y = lu_solve(self.lu, a, check_finite=False)
        for r, w in self.etas:
            yr = y[r] / w[r]
            y -= w * yr
            y[r] = yr
        return y

    def btran(self, c):
        if self.m == 0:
            return np.zeros(0)
        z = np.array(c, dtype=float)
        for r, w in reversed(self.etas):
            z[r] = (z[r] - (w @ z - w[r] * z[r])) / w[r]
        return lu_solve(self.lu, z, trans=1, check_finite=False)


class BoundedSimplex:
    def __init__(self, M, q, g, lo, hi, settings: LpSettings | None = None):
        self.settings = settings or LpSettings()
        M = np.asarray(M, dtype=float)
        self.m, self.n = M.shape
        q = np.asarray(q, dtype=float)
        g = np.asarray(g, dtype=float)
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if self.settings.scaling and M.size:
            self.rs, self.cs = equilibrate(M)
        else:
            self.rs, self.cs = np.ones(self.m), np.ones(self.n)
        self.M = M * self.rs[:, None] * self.cs[None, :]
        self.q = q * self.rs
        self.g = g * self.cs
        self.lo = lo / self.cs
        self.hi = hi / self.cs
        self.colnorm = np.maximum(np.linalg.norm(self.M, axis=0), 1e-12)

    # -- column access (structural columns then artificial columns) --------

    def _column(self, j):
        if j < self.n:
            return self.M[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = self.art_sign[j - self.n]
        return col

    def _basis_matrix(self):
        B = np.zeros((self.m, self.m))
        for pos, j in enumerate(self.basis):
            if j < self.n:
                B[:, pos] = self.M[:, j]
            else:
                B[j - self.n, pos] = self.art_sign[j - self.n]
        return B

    def _nonbasic_state(self, j):
        lo, hi = self.lo_t[j], self.hi_t[j]
        if lo == hi:
            return FIXED
        if np.isfinite(lo) and self.v[j] == lo:
            return AT_LOWER
        if np.isfinite(hi) and self.v[j] == hi:
            return AT_UPPER
        return FREE

    # -- setup ---------------------------------------------------------------

    def _initialize(self):
        m, n = self.m, self.n
        lo, hi = self.lo, self.hi
        v = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        resid = self.q - self.M @ v
        self.art_sign = np.where(resid >= 0, 1.0, -1.0)
        self.lo_t = np.concatenate([lo, np.zeros(m)])
        self.hi_t = np.concatenate([hi, np.full(m, np.inf)])
        self.v = np.concatenate([v, np.abs(resid)])
        basis = np.arange(n, n + m)

        # crash: a structural column with a single nonzero in row i can take
        # over that row if it absorbs the residual within its bounds
        if n and m:
            nnz = np.count_nonzero(self.M, axis=0)
            covered = np.zeros(m, dtype=bool)
            for j in np.flatnonzero(nnz == 1):
                i = int(np.flatnonzero(self.M[:, j])[0])
                if covered[i]:
                    continue
                val = v[j] + resid[i] / self.M[i, j]
                tol = self.settings.feas_tol
                if lo[j] - tol <= val <= hi[j] + tol:
                    covered[i] = True
                    basis[i] = j
                    self.v[j] = min(max(val, lo[j]), hi[j])
                    self.v[n + i] = 0.0
                    self.hi_t[n + i] = 0.0
        self.basis = basis
        self.state = np.empty(n + m, dtype=np.int8)
        for j in range(n + m):
            self.state[j] = self._nonbasic_state(j)
        self.state[basis] = BASIC
        self.iterations = 0

    def _refactor(self):
        self.factor = _Factor(self._basis_matrix())
        full = self.v.copy()
        full[self.basis] = 0.0
        rhs = self.q - self.M @ full[: self.n] - self.art_sign * full[self.n :]
        xB = self.factor.ftran(rhs)
        if self.m:
            B = self._basis_matrix()
            xB += self.factor.ftran(rhs - B @ xB)
        self.v[self.basis] = xB

    # -- main loop -------------------------------------------------------------

    def _run_phase(self, cost):
        s = self.settings
        n, m = self.n, self.m
        cap = s.iteration_cap(m, n)
        gscale = 1.0 + np.abs(cost).max(initial=0.0)
        opt_tol = s.opt_tol * gscale
        degenerate = 0
        self._refactor()
        while True:
            if len(self.factor.etas) >= s.refactor_every:
                self._refactor()
            pi = self.factor.btran(cost[self.basis])
            d = np.empty(n + m)
            d[:n] = cost[:n] - self.M.T @ pi
            d[n:] = cost[n:] - self.art_sign * pi

            st = self.state
            eligible = (
                ((st == AT_LOWER) & (d < -opt_tol))
                | ((st == AT_UPPER) & (d > opt_tol))
                | ((st == FREE) & (np.abs(d) > opt_tol))
            )
            cand = np.flatnonzero(eligible)
            if cand.size == 0:
                return OPTIMAL, pi, d
            bland = degenerate >= s.stall_threshold
            if bland:
                q = int(cand[0])
            else:
                norms = np.ones(cand.size)
                struct = cand < n
                norms[struct] = self.colnorm[cand[struct]]
                q = int(cand[np.argmax(np.abs(d[cand]) / norms)])
            sigma = -1.0 if d[q] > 0 else 1.0

            w = self.factor.ftran(self._column(q))
            alpha = sigma * w
            xB = self.v[self.basis]
            loB = self.lo_t[self.basis]
            hiB = self.hi_t[self.basis]
            ptol = s.pivot_tol * max(1.0, np.abs(w).max(initial=0.0))
            dec = alpha > ptol
            inc = alpha < -ptol
            with np.errstate(divide="ignore", invalid="ignore"):
                exact = np.full(m, np.inf)
                exact[dec] = (xB[dec] - loB[dec]) / alpha[dec]
                exact[inc] = (hiB[inc] - xB[inc]) / (-alpha[inc])
                exact = np.maximum(exact, 0.0)
            span = self.hi_t[q] - self.v[q] if sigma > 0 else self.v[q] - self.lo_t[q]

            r = -1
            step = span
            finite = np.isfinite(exact)
            if finite.any():
                if bland:
                    tmin = exact[finite].min()
                    ties = np.flatnonzero(exact <= tmin + 1e-12 * (1.0 + tmin))
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    relaxed = np.full(m, np.inf)
                    relaxed[dec] = (xB[dec] - loB[dec] + s.feas_tol) / alpha[dec]
                    relaxed[inc] = (hiB[inc] - xB[inc] + s.feas_tol) / (-alpha[inc])
                    tmax = max(relaxed.min(), 0.0)
                    ties = np.flatnonzero(exact <= tmax)
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                step = exact[r]
                if span <= step:
                    r, step = -1, span

            if not np.isfinite(step):
                return UNBOUNDED, pi, d

            self.iterations += 1
            if self.iterations > cap:
                raise NumericalBreakdown(f"simplex iteration cap {cap} exceeded")
            degenerate = degenerate + 1 if step <= s.feas_tol else 0

            self.v[self.basis] = xB - step * alpha
            if r < 0:
                # bound flip of the entering variable
                if sigma > 0:
                    self.v[q] = self.hi_t[q]
                    self.state[q] = AT_UPPER
                else:
                    self.v[q] = self.lo_t[q]
                    self.state[q] = AT_LOWER
                continue
            leaving = int(self.basis[r])
            entering_value = self.v[q] + sigma * step
            if alpha[r] > 0:
                self.v[leaving] = self.lo_t[leaving]
            else:
                self.v[leaving] = self.hi_t[leaving]
            self.state[leaving] = self._nonbasic_state(leaving)
            self.basis[r] = q
            self.state[q] = BASIC
            self.v[q] = entering_value
            self.factor.etas.append((r, w))

    def solve(self) -> SimplexResult:
        n, m = self.n, self.m
        self._initialize()

        art = slice(n, n + m)
        if np.any(self.v[art] > 0):
            phase1 = np.concatenate([np.zeros(n), np.ones(m)])
            status, _, _ = self._run_phase(phase1)
            self._refactor()
            infeas = float(np.abs(self.v[art]).sum())
            scale = 1.0 + np.abs(self.q).max(initial=0.0)
            if infeas > self.settings.feas_tol * scale * max(1, m) ** 0.5:
                logger.debug("phase 1 ended with infeasibility %.3e", infeas)
                return self._result(INFEASIBLE, np.zeros(m), np.zeros(n + m), infeas)
        # artificials are pinned at zero for phase 2
        self.hi_t[art] = 0.0
        nb_art = np.flatnonzero(self.state[art] != BASIC) + n
        self.v[nb_art] = 0.0
        self.state[nb_art] = FIXED

        phase2 = np.concatenate([self.g, np.zeros(m)])
        status, pi, d = self._run_phase(phase2)
        if status == OPTIMAL:
            self._refactor()
            pi = self.factor.btran(phase2[self.basis])
            d = phase2.copy()
            d[:n] -= self.M.T @ pi
            d[n:] -= self.art_sign * pi
        return self._result(status, pi, d, 0.0)

    def _result(self, status, pi, d, infeas):
        v = self.v[: self.n] * self.cs
        return SimplexResult(
            status=status,
            v=v,
            pi=pi * self.rs,
            d=d[: self.n] / self.cs,
            iterations=self.iterations,
            infeasibility=infeas,
        )


def bounded_simplex(M, q, g, lo, hi, settings: LpSettings | None = None) -> SimplexResult:
    """Solve ``min g'v s.t. M v = q, lo <= v <= hi`` with the revised simplex."""
    M = np.asarray(M, dtype=float)
    m, n = M.shape
    if m == 0:
        g = np.asarray(g, dtype=float)
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        v = np.where(g > 0, lo, np.where(g < 0, hi, np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))))
        if not np.all(np.isfinite(v)):
            return SimplexResult(UNBOUNDED, np.where(np.isfinite(v), v, 0.0), np.zeros(0), g.copy(), 0)
        return SimplexResult(OPTIMAL, v, np.zeros(0), g.copy(), 0)
    return BoundedSimplex(M, q, g, lo, hi, settings).solve()
