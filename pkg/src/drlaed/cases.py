"""Bundled test networks.

``toy`` and ``triangle`` ship as JSON files; ``case39`` and ``syn118`` are
built in code. ``case39`` uses the branch list, loads and generator buses
of the classic 39-bus New England system with invented linear costs and a
daylight load profile. ``syn118`` is a seeded random network with the
dimensions of the 118-bus system (186 lines, 54 generators).
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .errors import InputError
from .grid import Network

# from, to, reactance [p.u.], rating [MW]
_BRANCHES_39 = [
    (1, 2, 0.0411, 600), (1, 39, 0.0250, 1000), (2, 3, 0.0151, 500), (2, 25, 0.0086, 500),
    (2, 30, 0.0181, 900), (3, 4, 0.0213, 500), (3, 18, 0.0133, 500), (4, 5, 0.0128, 600),
    (4, 14, 0.0129, 500), (5, 6, 0.0026, 1200), (5, 8, 0.0112, 900), (6, 7, 0.0092, 900),
    (6, 11, 0.0082, 480), (6, 31, 0.0250, 1800), (7, 8, 0.0046, 900), (8, 9, 0.0363, 900),
    (9, 39, 0.0250, 900), (10, 11, 0.0043, 600), (10, 13, 0.0043, 600), (10, 32, 0.0200, 900),
    (12, 11, 0.0435, 500), (12, 13, 0.0435, 500), (13, 14, 0.0101, 600), (14, 15, 0.0217, 600),
    (15, 16, 0.0094, 600), (16, 17, 0.0089, 600), (16, 19, 0.0195, 600), (16, 21, 0.0135, 600),
    (16, 24, 0.0059, 600), (17, 18, 0.0082, 600), (17, 27, 0.0173, 600), (19, 20, 0.0138, 900),
    (19, 33, 0.0142, 900), (20, 34, 0.0180, 900), (21, 22, 0.0140, 900), (22, 23, 0.0096, 600),
    (22, 35, 0.0143, 900), (23, 24, 0.0350, 600), (23, 36, 0.0272, 900), (25, 26, 0.0323, 600),
    (25, 37, 0.0232, 900), (26, 27, 0.0147, 600), (26, 28, 0.0474, 600), (26, 29, 0.0625, 600),
    (28, 29, 0.0151, 600), (29, 38, 0.0156, 1200),
]
_LOADS_39 = {
    3: 322.0, 4: 500.0, 7: 233.8, 8: 522.0, 12: 7.5, 15: 320.0, 16: 329.0, 18: 158.0,
    20: 628.0, 21: 274.0, 23: 247.5, 24: 308.6, 25: 224.0, 26: 139.0, 27: 281.0,
    28: 206.0, 29: 283.5, 31: 9.2, 39: 1104.0,
}
# bus, pmax [MW], cost [$/MWh]
_GENS_39 = [
    (30, 1040, 12.0), (31, 646, 30.0), (32, 725, 26.0), (33, 652, 18.0), (34, 508, 34.0),
    (35, 687, 22.0), (36, 580, 28.0), (37, 564, 16.0), (38, 865, 14.0), (39, 1100, 38.0),
]


def daylight_profile(horizon: int, start_hour: int = 7) -> np.ndarray:
    """Relative demand over ``horizon`` hours starting at ``start_hour``,
    peaking in the early evening."""
    h = start_hour + np.arange(horizon)
    return 0.8 + 0.2 * np.sin(np.pi * (h - 6) / 14.0).clip(0.0)


def case39(horizon: int = 12, res_buses=(2, 25, 29), load_scale: float = 1.0,
           line_scale: float = 1.0, ramp_fraction: float = 0.5, start_hour: int = 7) -> Network:
    """39-bus network with renewable sites at ``res_buses``.

    Line ratings are multiplied by ``line_scale`` and loads by
    ``load_scale`` times :func:`daylight_profile`. Initial set-points split
    the first-period demand pro rata to capacity.
    """
    prof = daylight_profile(horizon, start_hour) * load_scale
    loads = [{"bus": b, "demand": list(d * prof)} for b, d in _LOADS_39.items()]
    total0 = sum(_LOADS_39.values()) * prof[0]
    cap = sum(g[1] for g in _GENS_39)
    gens = [{"bus": b, "cost": c, "pmin": 0.0, "pmax": float(p),
             "rd": -ramp_fraction * p, "ru": ramp_fraction * p, "p0": p * total0 / cap}
            for b, p, c in _GENS_39]
    data = {
        "name": "case39",
        "buses": list(range(1, 40)),
        "slack": 31,
        "horizon": horizon,
        "lines": [{"from": f, "to": t, "b": 1.0 / x, "fmax": r * line_scale} for f, t, x, r in _BRANCHES_39],
        "generators": gens,
        "res": [{"bus": b} for b in res_buses],
        "loads": loads,
    }
    return Network.from_dict(data)


def syn118(seed: int = 0, horizon: int = 24, n_res: int = 18) -> Network:
    """Random connected network with 118 buses, 186 lines and 54 generators."""
    rng = np.random.default_rng(seed)
    nb, ne, ng = 118, 186, 54
    buses = list(range(1, nb + 1))
    edges = set()
    lines = []
    for k in range(1, nb):
        j = int(rng.integers(max(0, k - 6), k))
        edges.add((j, k))
    while len(edges) < ne:
        a, b = sorted(int(v) for v in rng.integers(0, nb, 2))
        if a != b and b - a <= 12:
            edges.add((a, b))
    for a, b in sorted(edges):
        lines.append({"from": a + 1, "to": b + 1, "b": float(rng.uniform(5, 50)),
                      "fmax": float(rng.uniform(150, 500))})
    gen_buses = sorted(rng.choice(nb, ng, replace=False) + 1)
    res_buses = sorted(rng.choice(nb, n_res, replace=False) + 1)
    load_buses = sorted(rng.choice(nb, 90, replace=False) + 1)
    prof = daylight_profile(horizon, 0)
    demand = rng.uniform(20, 80, len(load_buses))
    cap = rng.uniform(100, 400, ng)
    cap *= 1.5 * demand.sum() / cap.sum()
    gens = [{"bus": int(b), "cost": float(rng.uniform(10, 50)), "pmin": 0.0, "pmax": float(p),
             "rd": -0.4 * float(p), "ru": 0.4 * float(p), "p0": float(p) * demand.sum() * prof[0] / cap.sum()}
            for b, p in zip(gen_buses, cap)]
    data = {
        "name": "syn118", "buses": buses, "slack": 1, "horizon": horizon, "lines": lines,
        "generators": gens, "res": [{"bus": int(b)} for b in res_buses],
        "loads": [{"bus": int(b), "demand": list(d * prof)} for b, d in zip(load_buses, demand)],
    }
    return Network.from_dict(data)


def _bundled_json(name: str) -> Network:
    text = resources.files("drlaed").joinpath("data", f"{name}.json").read_text()
    return Network.from_dict(json.loads(text), name=name)


BUILTIN = {
    "toy": lambda: _bundled_json("toy"),
    "triangle": lambda: _bundled_json("triangle"),
    "case39": case39,
    "syn118": syn118,
}


def load_case(name: str) -> Network:
    """Return a bundled network by name."""
    try:
        return BUILTIN[name]()
    except KeyError:
        raise InputError(f"unknown bundled case {name!r}; available: {', '.join(BUILTIN)}") from None
