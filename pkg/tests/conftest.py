import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from drlaed.grid import Network  # noqa: E402


def random_network(rng, n_bus=5, n_extra=2, n_gen=3, n_res=2, n_load=3, horizon=2,
                   fmax=(40.0, 120.0), cap=(50.0, 150.0)):
    """Random connected network: a random spanning tree plus ``n_extra`` chords."""
    buses = list(range(1, n_bus + 1))
    edges = []
    for k in range(1, n_bus):
        edges.append((int(rng.integers(0, k)), k))
    seen = {tuple(sorted(e)) for e in edges}
    tries = 0
    while len(edges) < n_bus - 1 + n_extra and tries < 100:
        tries += 1
        a, b = (int(v) for v in rng.integers(0, n_bus, 2))
        if a != b and tuple(sorted((a, b))) not in seen:
            seen.add(tuple(sorted((a, b))))
            edges.append((a, b))
    lines = [{"from": a + 1, "to": b + 1, "b": float(rng.uniform(1, 20)),
              "fmax": float(rng.uniform(*fmax))} for a, b in edges]
    pmax = rng.uniform(*cap, n_gen)
    demand = rng.uniform(10, 40, (n_load, horizon))
    gens = [{"bus": int(rng.integers(1, n_bus + 1)), "cost": list(rng.uniform(5, 50, horizon)),
             "pmin": 0.0, "pmax": float(p), "rd": -0.6 * float(p), "ru": 0.6 * float(p),
             "p0": 0.3 * float(p)} for p in pmax]
    data = {
        "buses": buses, "slack": 1, "horizon": horizon, "lines": lines, "generators": gens,
        "res": [{"bus": int(rng.integers(1, n_bus + 1))} for _ in range(n_res)],
        "loads": [{"bus": int(rng.integers(1, n_bus + 1)), "demand": list(d)} for d in demand],
    }
    return Network.from_dict(data)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def toy_network(pmax=2.0, demand=1.5):
    """One bus, one generator (cost 1), one renewable site, one load, T = 1."""
    return Network.from_dict({
        "buses": [1], "slack": 1, "horizon": 1, "lines": [],
        "generators": [{"bus": 1, "cost": 1.0, "pmin": 0.0, "pmax": pmax, "p0": 1.0}],
        "res": [{"bus": 1}], "loads": [{"bus": 1, "demand": demand}],
    })
