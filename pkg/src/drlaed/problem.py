"""Look-ahead economic dispatch in compact form ``min c'x, Ax <= b, Dx + E w <= f``.

Decision vector ``x`` stacks generator set-points period by period
(``x[t * N_g + i] = p_i[t]``); the uncertain vector ``w`` stacks renewable
outputs the same way (``w[t * N_r + j] = w_j[t]``).

Deterministic rows (``A``), per period and generator:
    ramp-up, ramp-down, capacity upper, capacity lower.
Uncertain rows (``D, E, f``), per period:
    one power-balance row, then ``N_e`` forward and ``N_e`` reverse
    line-flow rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, MissingInitialSetpoint
from .grid import Network, PtdfMatrix, build_ptdf, incidence_maps


@dataclass(eq=False)
class CompactProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    D: np.ndarray
    E: np.ndarray
    f: np.ndarray
    horizon: int = 1
    n_gen: int | None = None
    n_res: int | None = None
    n_lines: int = 0
    line_rows: np.ndarray | None = None
    line_limits: np.ndarray | None = None
    row_names: list[str] = field(default_factory=list)
    det_row_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n_x = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n_x)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.D = np.asarray(self.D, dtype=float).reshape(-1, n_x)
        self.f = np.asarray(self.f, dtype=float).reshape(-1)
        K = self.f.size
        self.E = np.asarray(self.E, dtype=float).reshape(K, -1)
        if self.A.shape[0] != self.b.size:
            raise DimensionMismatch("A and b disagree on the number of rows")
        if self.D.shape[0] != K:
            raise DimensionMismatch("D and f disagree on the number of rows")
        if self.n_gen is None:
            self.n_gen = n_x // self.horizon
        if self.n_res is None:
            self.n_res = self.E.shape[1] // self.horizon

    @property
    def n_x(self) -> int:
        return self.c.size

    @property
    def n_omega(self) -> int:
        return self.E.shape[1]

    @property
    def K(self) -> int:
        return self.f.size

    @property
    def m_det(self) -> int:
        return self.b.size

    def x_index(self, gen: int, t: int) -> int:
        return t * self.n_gen + gen

    def omega_index(self, site: int, t: int) -> int:
        return t * self.n_res + site

    def omega_labels(self) -> list[str]:
        return [f"res{j}_t{t}" for t in range(self.horizon) for j in range(self.n_res)]

    def slacks(self, x, omega):
        """Row values ``D x + E w - f``; ``omega`` may be one vector or an
        ``N x n_omega`` matrix (rows are samples)."""
        x = np.asarray(x, dtype=float)
        omega = np.asarray(omega, dtype=float)
        if x.shape != (self.n_x,):
            raise DimensionMismatch(f"x has shape {x.shape}, expected ({self.n_x},)")
        if omega.shape[-1] != self.n_omega:
            raise DimensionMismatch(f"omega has {omega.shape[-1]} components, expected {self.n_omega}")
        base = self.D @ x - self.f
        return base + omega @ self.E.T

    def deterministic_rows(self):
        """``(A, b)`` restricted to rows with a finite right-hand side."""
        keep = np.isfinite(self.b)
        return self.A[keep], self.b[keep]

    def line_flows(self, x, omega):
        """Signed flows with shape ``(..., T, N_e)`` recovered from the forward rows."""
        if self.line_rows is None:
            raise DimensionMismatch("problem carries no line-flow metadata")
        s = self.slacks(x, omega)
        return s[..., self.line_rows] + self.line_limits


def constraint_value(compact: CompactProblem, x, omega):
    """``Z(x, w) = max_k d_k'x + e_k'w - f_k``; nonpositive iff every
    uncertain row holds. Vectorized over sample rows of ``omega``."""
    s = compact.slacks(x, omega)
    if s.shape[-1] == 0:
        return np.full(s.shape[:-1], -np.inf) if s.ndim > 1 else -np.inf
    return s.max(axis=-1)


def dimensions(network: Network, horizon: int | None = None, ramp_from_initial: bool = True) -> dict:
    """Sizes of the compact problem without assembling any matrices."""
    T = network.horizon if horizon is None else horizon
    ng, nr, ne = network.n_gen, network.n_res, network.n_line
    ramp_periods = T if ramp_from_initial else T - 1
    return {
        "n_x": T * ng,
        "n_omega": T * nr,
        "K": T * (1 + 2 * ne),
        "m_det": 2 * ng * ramp_periods + 2 * ng * T,
    }


def assemble(network: Network, ptdf: PtdfMatrix | None = None, horizon: int | None = None,
             ramp_from_initial: bool = True) -> CompactProblem:
    """Assemble the compact dispatch problem.

    Parameters
    ----------
    network : Network
    ptdf : PtdfMatrix, optional
        Computed with :func:`~drlaed.grid.build_ptdf` when omitted.
    horizon : int, optional
        Number of periods (defaults to ``network.horizon``, and may not exceed it).
    ramp_from_initial : bool
        Include the first-period ramp rows against ``p0``. Disabling drops
        those ``2 N_g`` rows and the need for initial set-points.
    """
    T = network.horizon if horizon is None else int(horizon)
    if T < 1 or T > network.horizon:
        raise DimensionMismatch(f"horizon {T} outside 1..{network.horizon}")
    if ptdf is None:
        ptdf = build_ptdf(network)
    ng, nr, nl, ne = network.n_gen, network.n_res, network.n_load, network.n_line
    if ptdf.entries.shape != (ne, network.n_bus):
        raise DimensionMismatch("PTDF shape does not match the network")
    if ramp_from_initial:
        missing = [k for k, g in enumerate(network.generators) if g.p0 is None]
        if missing:
            raise MissingInitialSetpoint(f"generators {missing} lack an initial set-point p0")
    Bg, Br, Bl = incidence_maps(network, T)
    Lam = ptdf.entries
    Hg, Hr, Hl = Lam @ Bg, Lam @ Br, Lam @ Bl

    gens = network.generators
    cost = np.array([g.cost[:T] for g in gens]).reshape(ng, T)
    pmin = np.array([g.pmin[:T] for g in gens]).reshape(ng, T)
    pmax = np.array([g.pmax[:T] for g in gens]).reshape(ng, T)
    rd = np.array([g.rd[:T] for g in gens]).reshape(ng, T)
    ru = np.array([g.ru[:T] for g in gens]).reshape(ng, T)
    demand = np.array([ld.demand[:T] for ld in network.loads]).reshape(nl, T)
    fmax = np.array([ln.fmax for ln in network.lines])

    n_x = T * ng
    c = cost.T.reshape(-1)

    A_rows, b_rows, det_names = [], [], []
    for t in range(T):
        for i in range(ng):
            col = t * ng + i
            if t > 0 or ramp_from_initial:
                prev = None if t == 0 else (t - 1) * ng + i
                p_prev = gens[i].p0 if t == 0 else 0.0
                up = np.zeros(n_x)
                up[col] = 1.0
                if prev is not None:
                    up[prev] = -1.0
                A_rows += [up, -up]
                b_rows += [ru[i, t] + p_prev, -rd[i, t] - p_prev]
                det_names += [f"rampup_g{i}_t{t}", f"rampdown_g{i}_t{t}"]
            e = np.zeros(n_x)
            e[col] = 1.0
            A_rows += [e, -e]
            b_rows += [pmax[i, t], -pmin[i, t]]
            det_names += [f"pmax_g{i}_t{t}", f"pmin_g{i}_t{t}"]
    A = np.array(A_rows).reshape(-1, n_x)
    b = np.array(b_rows, dtype=float)
    # rows with an infinite right-hand side are vacuous; LP builders drop them

    K = T * (1 + 2 * ne)
    n_w = T * nr
    D = np.zeros((K, n_x))
    E = np.zeros((K, n_w))
    f = np.zeros(K)
    names = []
    line_rows = np.zeros((T, ne), dtype=int)
    for t in range(T):
        r0 = t * (1 + 2 * ne)
        xs = slice(t * ng, (t + 1) * ng)
        ws = slice(t * nr, (t + 1) * nr)
        D[r0, xs] = -1.0
        E[r0, ws] = -1.0
        f[r0] = -demand[:, t].sum()
        names.append(f"balance_t{t}")
        load_flow = Hl @ demand[:, t]
        fw = slice(r0 + 1, r0 + 1 + ne)
        rv = slice(r0 + 1 + ne, r0 + 1 + 2 * ne)
        D[fw, xs] = Hg
        E[fw, ws] = Hr
        f[fw] = fmax + load_flow
        D[rv, xs] = -Hg
        E[rv, ws] = -Hr
        f[rv] = fmax - load_flow
        line_rows[t] = np.arange(fw.start, fw.stop)
        names += [f"flow_fwd_l{e}_t{t}" for e in range(ne)]
        names += [f"flow_rev_l{e}_t{t}" for e in range(ne)]

    return CompactProblem(
        c=c, A=A, b=b, D=D, E=E, f=f,
        horizon=T, n_gen=ng, n_res=nr, n_lines=ne,
        line_rows=line_rows, line_limits=fmax,
        row_names=names, det_row_names=det_names,
    )
