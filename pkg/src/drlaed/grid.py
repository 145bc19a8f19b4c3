"""Network model, PTDF matrix and bus placement matrices."""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NetworkError, SingularNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Line:
    from_bus: object
    to_bus: object
    b: float
    fmax: float


@dataclass(frozen=True, eq=False)
class Generator:
    """Conventional unit; per-period arrays have length ``horizon``.

    ``rd`` is the (nonpositive) ramp-down limit and ``ru`` the ramp-up
    limit, both in MW per period, so ``rd <= p[t] - p[t-1] <= ru``.
    """

    bus: object
    cost: np.ndarray
    pmin: np.ndarray
    pmax: np.ndarray
    rd: np.ndarray
    ru: np.ndarray
    p0: float | None


@dataclass(frozen=True, eq=False)
class Load:
    bus: object
    demand: np.ndarray


@dataclass(eq=False)
class Network:
    buses: list
    lines: list[Line]
    generators: list[Generator]
    res_sites: list
    loads: list[Load]
    slack: object
    horizon: int
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    @property
    def n_bus(self):
        return len(self.buses)

    @property
    def n_line(self):
        return len(self.lines)

    @property
    def n_gen(self):
        return len(self.generators)

    @property
    def n_res(self):
        return len(self.res_sites)

    @property
    def n_load(self):
        return len(self.loads)

    def bus_index(self):
        return {b: i for i, b in enumerate(self.buses)}

    def validate(self):
        if len(set(self.buses)) != len(self.buses):
            raise NetworkError("bus ids must be unique")
        if not self.buses:
            raise NetworkError("network has no buses")
        if self.horizon < 1:
            raise NetworkError("horizon must be at least 1")
        known = set(self.buses)
        if self.slack not in known:
            raise NetworkError(f"slack bus {self.slack!r} is not a declared bus")
        for k, ln in enumerate(self.lines):
            if ln.from_bus not in known or ln.to_bus not in known:
                raise NetworkError(f"line {k} references an undeclared bus")
            if ln.from_bus == ln.to_bus:
                raise NetworkError(f"line {k} is a self-loop")
            if not ln.b > 0:
                raise NetworkError(f"line {k} susceptance must be positive")
            if not ln.fmax > 0:
                raise NetworkError(f"line {k} flow limit must be positive")
        T = self.horizon
        for k, g in enumerate(self.generators):
            if g.bus not in known:
                raise NetworkError(f"generator {k} references an undeclared bus")
            for name in ("cost", "pmin", "pmax", "rd", "ru"):
                if getattr(g, name).shape != (T,):
                    raise NetworkError(f"generator {k} field {name} must have {T} entries")
            if np.any(g.pmin > g.pmax):
                raise NetworkError(f"generator {k} has pmin > pmax")
            if np.any(g.rd > 0) or np.any(g.ru < 0):
                raise NetworkError(f"generator {k} needs rd <= 0 <= ru")
        for k, bus in enumerate(self.res_sites):
            if bus not in known:
                raise NetworkError(f"renewable site {k} references an undeclared bus")
        for k, ld in enumerate(self.loads):
            if ld.bus not in known:
                raise NetworkError(f"load {k} references an undeclared bus")
            if ld.demand.shape != (T,):
                raise NetworkError(f"load {k} demand must have {T} entries")

    def is_connected(self):
        idx = self.bus_index()
        adj = [[] for _ in self.buses]
        for ln in self.lines:
            a, b = idx[ln.from_bus], idx[ln.to_bus]
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        todo = deque([0])
        while todo:
            u = todo.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return len(seen) == len(self.buses)

    # -- (de)serialization ------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Network":
        """Build a network from the JSON schema (scalars broadcast over T)."""
        try:
            T = int(data["horizon"])
            buses = list(data["buses"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"network needs 'buses' and 'horizon': {exc}") from exc

        def per_period(value, what):
            arr = np.asarray(value, dtype=float)
            if arr.ndim == 0:
                return np.full(T, float(arr))
            if arr.shape != (T,):
                raise NetworkError(f"{what} must be a scalar or have {T} entries")
            return arr

        slack = data.get("slack")
        if slack is None:
            slack = buses[0] if buses else None
            logger.warning("no slack bus given; using first bus %r", slack)
        try:
            lines = [Line(d["from"], d["to"], float(d["b"]), float(d["fmax"])) for d in data.get("lines", [])]
            gens = []
            for k, d in enumerate(data.get("generators", [])):
                gens.append(Generator(
                    bus=d["bus"],
                    cost=per_period(d["cost"], f"generator {k} cost"),
                    pmin=per_period(d.get("pmin", 0.0), f"generator {k} pmin"),
                    pmax=per_period(d["pmax"], f"generator {k} pmax"),
                    rd=per_period(d.get("rd", -np.inf), f"generator {k} rd"),
                    ru=per_period(d.get("ru", np.inf), f"generator {k} ru"),
                    p0=None if d.get("p0") is None else float(d["p0"]),
                ))
            res = [d["bus"] if isinstance(d, dict) else d for d in data.get("res", [])]
            loads = [Load(d["bus"], per_period(d["demand"], f"load {k} demand"))
                     for k, d in enumerate(data.get("loads", []))]
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"malformed network entry: missing or invalid {exc}") from exc
        return cls(buses, lines, gens, res, loads, slack, T, name=name or data.get("name", ""))

    def to_dict(self) -> dict:
        def arr(a):
            a = np.asarray(a, dtype=float)
            if np.all(a == a[0]):
                return _jsonable(a[0])
            return [_jsonable(v) for v in a]

        return {
            "name": self.name,
            "buses": list(self.buses),
            "slack": self.slack,
            "horizon": self.horizon,
            "lines": [{"from": ln.from_bus, "to": ln.to_bus, "b": ln.b, "fmax": ln.fmax} for ln in self.lines],
            "generators": [
                {"bus": g.bus, "cost": arr(g.cost), "pmin": arr(g.pmin), "pmax": arr(g.pmax),
                 "rd": arr(g.rd), "ru": arr(g.ru), "p0": g.p0}
                for g in self.generators
            ],
            "res": [{"bus": b} for b in self.res_sites],
            "loads": [{"bus": ld.bus, "demand": arr(ld.demand)} for ld in self.loads],
        }


def _jsonable(v):
    v = float(v)
    if np.isposinf(v):
        return "inf"
    if np.isneginf(v):
        return "-inf"
    return v


def load_network(path) -> Network:
    with open(path) as fh:
        data = json.load(fh)
    return Network.from_dict(data)


@dataclass(eq=False)
class PtdfMatrix:
    """Line-flow sensitivities ``entries[e, s]`` to a unit injection at bus ``s``
    withdrawn at the slack bus. Positive flow runs from ``from_bus`` to
    ``to_bus``."""

    entries: np.ndarray
    slack: object
    line_order: list
    bus_order: list

    def flows(self, injections):
        return self.entries @ np.asarray(injections, dtype=float)


def build_ptdf(network: Network, slack=None) -> PtdfMatrix:
    """PTDF matrix by dense factorization of the reduced nodal Laplacian.

    ``Lambda = diag(b) @ C @ inv(L_red)`` with ``C`` the line-bus incidence
    (+1 at the from-bus, -1 at the to-bus); the slack column is zero.

    Raises
    ------
    SingularNetwork
        If the line graph is disconnected or the reduced Laplacian is
        numerically singular.
    """
    slack = network.slack if slack is None else slack
    idx = network.bus_index()
    if slack not in idx:
        raise NetworkError(f"slack bus {slack!r} is not a declared bus")
    ns, ne = network.n_bus, network.n_line
    if not network.is_connected():
        raise SingularNetwork("line graph is disconnected")
    C = np.zeros((ne, ns))
    b = np.empty(ne)
    for e, ln in enumerate(network.lines):
        C[e, idx[ln.from_bus]] = 1.0
        C[e, idx[ln.to_bus]] = -1.0
        b[e] = ln.b
    L = C.T @ (b[:, None] * C)
    s = idx[slack]
    keep = np.array([i for i in range(ns) if i != s], dtype=int)
    entries = np.zeros((ne, ns))
    if keep.size:
        L_red = L[np.ix_(keep, keep)]
        if np.linalg.cond(L_red) > 1e12:
            raise SingularNetwork("reduced nodal susceptance matrix is singular")
        X = np.linalg.solve(L_red, np.eye(keep.size))
        entries[:, keep] = (b[:, None] * C[:, keep]) @ X
        entries[np.abs(entries) < 1e-12] = 0.0  # round-off on structurally zero entries
    return PtdfMatrix(entries, slack, list(range(ne)), list(network.buses))


def incidence_maps(network: Network, horizon: int | None = None):
    """Bus placement matrices ``(B_g, B_r, B_l)`` of shapes ``N_s x N_g``,
    ``N_s x N_r`` and ``N_s x N_l``. ``horizon`` is accepted for symmetry
    with the assembly routines; placement does not vary over time."""
    idx = network.bus_index()
    ns = network.n_bus

    def place(buses):
        B = np.zeros((ns, len(buses)))
        for j, bus in enumerate(buses):
            B[idx[bus], j] = 1.0
        return B

    return (
        place([g.bus for g in network.generators]),
        place(list(network.res_sites)),
        place([ld.bus for ld in network.loads]),
    )
