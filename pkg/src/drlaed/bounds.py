"""Per-component distributionally robust bounds on the renewable outputs.

For one scalar component with samples ``w_1..w_N`` the worst-case
probability (over a Wasserstein ball of radius ``theta``) of leaving
``[lo, hi]`` is

    inf_{lam >= 0}  lam * theta + mean(max(0, 1 - lam * d_i))

with ``d_i`` the distance from ``w_i`` to the violation region. The region
is two-sided, ``[0, lo) U (hi, inf)``, when ``lo > 0`` and reduces to
``[hi, inf)`` when ``lo = 0`` since outputs are nonnegative.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvalidBounds
from .risk import AmbiguitySpec, SampleSet

N_MARGINS = 64
GRID_INTERVALS = 256
SPLIT = 8
KEEP = 64
HI_TOL = 1e-9


# -- worst-case probability ----------------------------------------------------

def _distances(lo, hi, w):
    """Distances ``(M, N)`` for candidate arrays ``lo, hi`` of shape ``(M,)``."""
    lo = lo[:, None]
    hi = hi[:, None]
    two_sided = np.maximum(0.0, np.minimum(hi - w, w - lo))
    upper_only = np.maximum(0.0, hi - w)
    return np.where(lo > 0, two_sided, upper_only)


def _wcv_from_distances(d, theta):
    """Exact minimum of the piecewise-linear dual, row-wise over ``d``.

    At ``lam = 1 / d_j`` the samples with ``d_i < d_j`` contribute
    ``1 - d_i / d_j`` and the rest contribute nothing, so with ``d`` sorted
    the objective at every breakpoint follows from one cumulative sum.
    """
    N = d.shape[1]
    ds = np.sort(d, axis=1)
    cs = np.cumsum(ds, axis=1) - ds
    j = np.arange(N)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = theta / ds + (j - cs / ds) / N
    phi = np.where(ds > 0, phi, np.inf)
    return np.minimum(1.0, phi.min(axis=1))


def worst_case_violation(lo: float, hi: float, samples, theta: float) -> float:
    """Worst-case probability that the component falls outside ``[lo, hi]``.

    Parameters
    ----------
    lo, hi : float
        Interval with ``0 <= lo <= hi``.
    samples : array_like
        Nonnegative scalar samples of the component.
    theta : float
        Wasserstein radius.

    Returns
    -------
    float
        Value in ``[0, 1]``; equals the empirical out-of-interval fraction
        when ``theta = 0``.
    """
    lo, hi = float(lo), float(hi)
    if lo < 0 or lo > hi:
        raise InvalidBounds(f"need 0 <= lo <= hi, got [{lo}, {hi}]")
    if theta < 0:
        raise InputError("theta must be nonnegative")
    w = np.asarray(samples, dtype=float).reshape(-1)
    if w.size == 0:
        raise InputError("no samples")
    d = _distances(np.array([lo]), np.array([hi]), w)
    return float(_wcv_from_distances(d, float(theta))[0])


# -- bound minimization ---------------------------------------------------------

def _min_hi(los, w, theta, budget):
    """Smallest feasible ``hi`` for each candidate ``lo`` (``inf`` if none)."""
    los = np.asarray(los, dtype=float)
    wmax = w.max()
    top = np.maximum(2.0 * wmax - los, wmax + 2.0 * theta / budget) + 1e-6 * (1.0 + wmax)
    ok_top = _wcv_from_distances(_distances(los, top, w), theta) <= budget
    out = np.full(los.shape, np.inf)
    if not ok_top.any():
        return out
    lo_ok = los[ok_top]
    a = lo_ok.copy()
    b = top[ok_top].copy()
    at_lo = _wcv_from_distances(_distances(lo_ok, lo_ok, w), theta) <= budget
    span = float((b - a).max())
    n_iter = int(np.ceil(np.log2(max(span, HI_TOL) / HI_TOL))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        feas = _wcv_from_distances(_distances(lo_ok, mid, w), theta) <= budget
        b = np.where(feas, mid, b)
        a = np.where(feas, a, mid)
    out[ok_top] = np.where(at_lo, lo_ok, b)
    return out


def solve_component_bounds(samples, theta: float, budget: float, n_margins: int = N_MARGINS):
    """Narrowest interval whose worst-case violation probability is within budget.

    Candidate lower bounds are ``0``, the samples, the samples shifted down
    by ``n_margins`` log-spaced margins, and a branch-and-bound refinement
    over ``(0, max(samples)]``. The refinement relies on
    ``width(lo - delta) <= width(lo) + delta``, which bounds the width on
    a whole cell from its left endpoint. For each lower bound the minimal
    upper bound is found by bisection to ``1e-9``. Ties go to the smaller
    ``lo``.

    Returns
    -------
    (lo, hi) : tuple of float
    """
    w = np.asarray(samples, dtype=float).reshape(-1)
    if w.size == 0:
        raise InputError("no samples")
    if np.any(w < 0):
        raise InputError("component samples must be nonnegative")
    if not budget > 0:
        raise InputError("budget must be positive")
    theta = float(theta)
    if budget >= 1.0:
        v = float(w.min())
        return v, v

    wmax = float(w.max())
    rng = wmax - float(w.min())
    scale = max(rng, wmax, 1.0)
    m_lo = max(theta / budget * 1e-3, scale * 1e-12) if theta > 0 else scale * 1e-6
    m_hi = max(rng, 2.0 * theta / budget, 10.0 * m_lo)
    margins = np.geomspace(m_lo, m_hi, n_margins)
    seeds = np.concatenate([[0.0], w, (w[:, None] - margins[None, :]).ravel()])
    seeds = np.unique(np.maximum(seeds, 0.0))

    best_lo, best_w = np.inf, np.inf

    def consider(los):
        nonlocal best_lo, best_w
        his = _min_hi(los, w, theta, budget)
        widths = his - los
        m = widths.min(initial=np.inf)
        if np.isfinite(m):
            lo_m = float(los[widths <= m + 1e-12].min())
            if m < best_w - 1e-12 or (abs(m - best_w) <= 1e-12 and lo_m < best_lo):
                best_lo, best_w = lo_m, float(m)
        return widths

    consider(seeds)

    if wmax > 0:
        g = wmax / GRID_INTERVALS
        left = np.arange(GRID_INTERVALS) * g
        floor = wmax * 1e-12
        stop = max(wmax * 1e-8, HI_TOL)
        while True:
            widths = consider(np.maximum(left, floor))
            bound = widths - g
            live = np.isfinite(widths) & (bound <= best_w + 1e-12)
            if g <= stop or not live.any():
                break
            idx = np.flatnonzero(live)
            if idx.size > KEEP:
                idx = idx[np.argsort(bound[idx], kind="stable")[:KEEP]]
            g /= SPLIT
            left = (left[idx][:, None] + g * np.arange(SPLIT)[None, :]).ravel()

    if not np.isfinite(best_w):
        # unreachable for finite theta: lo = 0 with a large hi always works
        raise InvalidBounds("no feasible interval found")
    lo = best_lo
    hi = float(_min_hi(np.array([lo]), w, theta, budget)[0])
    return lo, hi


# -- the box -------------------------------------------------------------------

@dataclass
class ComponentBounds:
    lower: np.ndarray
    upper: np.ndarray
    achieved: np.ndarray
    budget: float
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.achieved = np.asarray(self.achieved, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise InvalidBounds("lower and upper bounds differ in length")
        if np.any(self.lower < 0) or np.any(self.lower > self.upper):
            raise InvalidBounds("bounds must satisfy 0 <= lower <= upper")
        if not self.labels:
            self.labels = [f"w{j}" for j in range(self.lower.size)]

    @property
    def n_omega(self) -> int:
        return self.lower.size

    def contains(self, omega, tol: float = 0.0):
        omega = np.asarray(omega, dtype=float)
        return np.all((omega >= self.lower - tol) & (omega <= self.upper + tol), axis=-1)

    def rows(self):
        return [(self.labels[j], self.lower[j], self.upper[j], self.achieved[j], self.budget)
                for j in range(self.n_omega)]

    def to_csv(self, fh, comment: str | None = None):
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["component", "lo", "hi", "achieved_wc_prob", "budget"])
        for label, lo, hi, p, b in self.rows():
            writer.writerow([label, f"{lo:.12g}", f"{hi:.12g}", f"{p:.12g}", f"{b:.12g}"])


def thread_count(threads: int | None = None) -> int:
    """Worker count from the argument or ``DRLAED_THREADS`` (0 means all CPUs)."""
    if threads is None:
        raw = os.environ.get("DRLAED_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise InputError(f"DRLAED_THREADS must be an integer, got {raw!r}") from None
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def build_box(samples: SampleSet, amb: AmbiguitySpec, solver=None, threads: int | None = None) -> ComponentBounds:
    """Bound every uncertainty component with the budget ``alpha / n_omega``.

    ``solver(samples_j, theta, budget) -> (lo, hi)`` defaults to
    :func:`solve_component_bounds` and is called exactly once per component.
    Results are ordered by component index regardless of ``threads``.
    """
    solver = solver or solve_component_bounds
    W = samples.samples
    n_w = W.shape[1]
    budget = amb.alpha / n_w
    cols = [W[:, j] for j in range(n_w)]

    def run(col):
        return solver(col, amb.theta, budget)

    workers = min(thread_count(threads), max(n_w, 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cols))
    else:
        results = [run(col) for col in cols]
    lower = np.array([r[0] for r in results], dtype=float)
    upper = np.array([r[1] for r in results], dtype=float)
    achieved = np.array([worst_case_violation(lo, hi, col, amb.theta)
                         for lo, hi, col in zip(lower, upper, cols)])
    return ComponentBounds(lower, upper, achieved, budget, list(samples.labels))
