"""Out-of-sample evaluation, radius sweeps and synthetic renewable data."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import ComponentBounds
from .errors import DimensionMismatch, DispatchError, EmptyInput, InputError
from .formulations import DR_METHODS, MethodSpec, solve_dispatch
from .problem import CompactProblem
from .risk import AmbiguitySpec, SampleSet

VIOLATION_TOL = 1e-6
N_BINS = 50


@dataclass
class EvaluationReport:
    """Joint violation frequency and line statistics of one dispatch.

    ``histograms[e]`` has ``N_BINS + 2`` counts: underflow, the uniform
    bins over ``[-fmax_e, fmax_e]``, overflow. Each validation sample
    contributes its flow on line ``e`` in the period where that line is
    most loaded relative to its limit, so every row sums to ``n_valid``.
    """

    violation_frequency: float
    n_violations: int
    n_valid: int
    row_violations: np.ndarray
    cost: float
    flow_min: np.ndarray
    flow_max: np.ndarray
    histograms: np.ndarray
    bin_edges: np.ndarray

    def histogram_rows(self):
        """``(line, bin_lo, bin_hi, count)`` tuples including the overflow bins."""
        rows = []
        for e in range(self.histograms.shape[0]):
            edges = self.bin_edges[e]
            rows.append((e, -np.inf, edges[0], self.histograms[e, 0]))
            for k in range(N_BINS):
                rows.append((e, edges[k], edges[k + 1], self.histograms[e, k + 1]))
            rows.append((e, edges[-1], np.inf, self.histograms[e, -1]))
        return rows


def evaluate(x, compact: CompactProblem, validation: SampleSet, tol: float = VIOLATION_TOL) -> EvaluationReport:
    """Evaluate dispatch ``x`` against every validation sample.

    A sample counts as a violation when any uncertain row exceeds its
    limit by more than ``tol``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != compact.n_x:
        raise DimensionMismatch(f"x has {x.size} entries, expected {compact.n_x}")
    W = validation.samples
    if W.shape[1] != compact.n_omega:
        raise DimensionMismatch(f"validation samples have {W.shape[1]} components, expected {compact.n_omega}")
    N = W.shape[0]
    s = compact.slacks(x, W)
    bad = s > tol
    joint = bad.any(axis=1) if compact.K else np.zeros(N, dtype=bool)
    n_viol = int(joint.sum())

    ne = compact.n_lines
    if ne and compact.line_rows is not None:
        flows = compact.line_flows(x, W)  # (N, T, ne)
        fmax = compact.line_limits
        worst_t = np.abs(flows / fmax).argmax(axis=1)  # (N, ne)
        peak = np.take_along_axis(flows, worst_t[:, None, :], axis=1)[:, 0, :]
        flow_min = flows.min(axis=(0, 1))
        flow_max = flows.max(axis=(0, 1))
        edges = np.linspace(-1.0, 1.0, N_BINS + 1)[None, :] * fmax[:, None]
        hist = np.zeros((ne, N_BINS + 2), dtype=int)
        for e in range(ne):
            idx = np.searchsorted(edges[e], peak[:, e], side="right")
            idx[peak[:, e] == edges[e, -1]] = N_BINS  # closed top bin
            hist[e] = np.bincount(idx, minlength=N_BINS + 2)
    else:
        flow_min = flow_max = np.zeros(0)
        edges = np.zeros((0, N_BINS + 1))
        hist = np.zeros((0, N_BINS + 2), dtype=int)

    return EvaluationReport(
        violation_frequency=n_viol / N,
        n_violations=n_viol,
        n_valid=N,
        row_violations=bad.sum(axis=0),
        cost=float(compact.c @ x),
        flow_min=flow_min,
        flow_max=flow_max,
        histograms=hist,
        bin_edges=edges,
    )


@dataclass
class SweepRow:
    theta: float
    method: str
    status: str
    cost: float | None
    violation_freq: float | None
    n_valid: int
    x: np.ndarray | None = field(default=None, repr=False)

    def as_tuple(self):
        return (self.theta, self.method, self.status, self.cost, self.violation_freq, self.n_valid)


SWEEP_COLUMNS = ("theta", "method", "status", "cost", "violation_freq", "n_valid")


def sweep(thetas, method: str, compact: CompactProblem, train: SampleSet, valid: SampleSet,
          alpha: float, ground_norm: str = "linf", G=None, h=None, settings=None,
          box_solver=None, tol: float = VIOLATION_TOL) -> list[SweepRow]:
    """Solve and evaluate ``method`` for each radius in ``thetas``.

    Rows whose master program is infeasible, unbounded or numerically
    unsolvable are kept with ``cost = None`` and their status.
    """
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise EmptyInput("no radii to sweep")
    if any(b < a for a, b in zip(thetas, thetas[1:])):
        raise InputError("radii must be sorted ascending")
    if method not in DR_METHODS:
        raise InputError(f"sweep needs one of {', '.join(DR_METHODS)}, got {method!r}")
    rows = []
    for theta in thetas:
        spec = MethodSpec(method, AmbiguitySpec(theta, alpha, ground_norm, G, h))
        try:
            sol = solve_dispatch(spec, compact, train, settings=settings, box_solver=box_solver)
        except DispatchError as exc:
            status = exc.solution.status if exc.solution is not None else "failure"
            rows.append(SweepRow(theta, method, status, None, None, valid.N))
            continue
        rep = evaluate(sol.x, compact, valid, tol)
        rows.append(SweepRow(theta, method, sol.status, sol.objective, rep.violation_frequency, valid.N, sol.x))
    return rows


def pareto_front(points):
    """Indices of the ``(cost, violation)`` pairs not dominated by any other,
    ordered by cost. ``None`` entries are skipped."""
    pts = [(i, c, v) for i, (c, v) in enumerate(points) if c is not None and v is not None]
    pts.sort(key=lambda p: (p[1], p[2], p[0]))
    front, best_v = [], np.inf
    for i, c, v in pts:
        if v < best_v:
            front.append(i)
            best_v = v
    return front


# -- synthetic renewable data -----------------------------------------------------

def clear_sky(horizon: int, start_hour: int = 7) -> np.ndarray:
    """Normalized clear-sky solar shape (sunrise 6h, sunset 20h)."""
    h = start_hour + np.arange(horizon) + 0.5
    return np.sin(np.pi * (h - 6.0) / 14.0).clip(0.0)


def solar_samples(n: int, capacity, horizon: int, seed: int = 0, shift: float = 0.0,
                  start_hour: int = 7, mean: float = 0.65, spread: float = 0.15) -> SampleSet:
    """Bounded synthetic solar scenarios, ``n x (horizon * n_sites)``.

    Output of site ``j`` at period ``t`` is ``capacity_j * clear_sky(t) * c``
    with a clearness index ``c`` clipped to ``[0, 1]``. ``c`` combines a
    day-wide factor, a per-site factor and hourly noise, all Gaussian with
    total standard deviation ``spread`` around ``mean``.

    ``shift`` (>= 0) is the train/validation distribution shift knob: the
    clearness mean drops by ``shift * spread`` and its standard deviation
    grows by the factor ``1 + shift``. ``shift = 0`` reproduces the
    training distribution.
    """
    capacity = np.atleast_1d(np.asarray(capacity, dtype=float))
    n_sites = capacity.size
    if n < 1:
        raise EmptyInput("need at least one sample")
    if shift < 0:
        raise InputError("shift must be nonnegative")
    rng = np.random.default_rng(seed)
    mu = mean - shift * spread
    sd = spread * (1.0 + shift)
    day = rng.standard_normal((n, 1, 1)) * 0.7
    site = rng.standard_normal((n, 1, n_sites)) * 0.5
    hour = rng.standard_normal((n, horizon, n_sites)) * 0.5
    c = np.clip(mu + sd * (day + site + hour) / np.sqrt(0.7**2 + 0.5**2 + 0.5**2), 0.0, 1.0)
    out = capacity[None, None, :] * clear_sky(horizon, start_hour)[None, :, None] * c
    labels = [f"res{j}_t{t}" for t in range(horizon) for j in range(n_sites)]
    return SampleSet(out.reshape(n, horizon * n_sites), labels)


def split(samples: SampleSet, n_train: int, seed: int = 0):
    """Seeded random split into ``(train, validation)``."""
    if not 0 < n_train < samples.N:
        raise InputError(f"n_train must lie in 1..{samples.N - 1}")
    perm = np.random.default_rng(seed).permutation(samples.N)
    return samples.subset(np.sort(perm[:n_train])), samples.subset(np.sort(perm[n_train:]))


def box_escape_fraction(box: ComponentBounds, samples: SampleSet) -> float:
    """Fraction of sample vectors with at least one component outside the box."""
    return float(np.mean(~box.contains(samples.samples)))
