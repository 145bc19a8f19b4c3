import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_network
from oracles import dc_flows
from drlaed.errors import NetworkError, SingularNetwork
from drlaed.grid import Network, build_ptdf, incidence_maps, load_network


def _net(buses, lines, slack=1, **extra):
    data = {"buses": buses, "slack": slack, "horizon": 1,
            "lines": [{"from": a, "to": b, "b": s, "fmax": 100.0} for a, b, s in lines]}
    data.update(extra)
    return Network.from_dict(data)


def triangle():
    return _net([1, 2, 3], [(1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0)])


def test_two_bus_row():
    P = build_ptdf(_net([1, 2], [(1, 2, 5.0)]))
    np.testing.assert_array_equal(P.entries, [[0.0, -1.0]])


def test_triangle_split():
    P = build_ptdf(triangle())
    col = P.entries[:, 1]
    # 2/3 returns on the direct line, 1/3 detours 2 -> 3 -> 1 (against the 1->3 orientation)
    np.testing.assert_allclose(col, [-2 / 3, 1 / 3, -1 / 3], atol=1e-12)
    np.testing.assert_array_equal(P.entries[:, 0], 0.0)


def test_slack_column_zero_for_other_slack():
    P = build_ptdf(triangle(), slack=3)
    np.testing.assert_array_equal(P.entries[:, 2], 0.0)


def conservation_residual(net, P, inj):
    idx = net.bus_index()
    f = P.flows(inj)
    bal = np.zeros(net.n_bus)
    for e, ln in enumerate(net.lines):
        bal[idx[ln.from_bus]] += f[e]
        bal[idx[ln.to_bus]] -= f[e]
    return np.abs(bal - inj).max() / (1.0 + np.abs(inj).max())


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 30), extra=st.integers(0, 15))
def test_flow_conservation(seed, n, extra):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n_bus=n, n_extra=extra)
    P = build_ptdf(net)
    for _ in range(5):
        inj = rng.normal(size=n)
        inj -= inj.mean()
        assert conservation_residual(net, P, inj) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 15))
def test_matches_angle_solution(seed, n):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n_bus=n, n_extra=3)
    P = build_ptdf(net)
    inj = rng.normal(size=n)
    lines = [(ln.from_bus, ln.to_bus, ln.b) for ln in net.lines]
    np.testing.assert_allclose(P.flows(inj), dc_flows(net.buses, lines, inj, net.slack), atol=1e-9)


def test_line_order_independence(rng):
    net = random_network(rng, n_bus=8, n_extra=4)
    perm = rng.permutation(net.n_line)
    data = net.to_dict()
    data["lines"] = [data["lines"][k] for k in perm]
    P1 = build_ptdf(net).entries
    P2 = build_ptdf(Network.from_dict(data)).entries
    np.testing.assert_allclose(P2, P1[perm], atol=1e-13)
    np.testing.assert_array_equal(build_ptdf(net).entries, P1)


def test_bridge_carries_everything():
    # radial chain 1-2-3-4 with a pendant 5 off bus 3
    net = _net([1, 2, 3, 4, 5], [(1, 2, 2.0), (2, 3, 1.0), (3, 4, 4.0), (3, 5, 0.5)])
    P = build_ptdf(net).entries
    # every line is a bridge: power from bus 4 to the slack crosses lines 0, 1, 2 against orientation
    np.testing.assert_allclose(P[:, 3], [-1, -1, -1, 0], atol=1e-12)
    np.testing.assert_allclose(P[:, 4], [-1, -1, 0, -1], atol=1e-12)


def test_bridge_in_meshed_network():
    # triangle 1-2-3 plus bridge 3->4
    net = _net([1, 2, 3, 4], [(1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0), (3, 4, 3.0)])
    P = build_ptdf(net).entries
    assert P[3, 3] == pytest.approx(-1.0, abs=1e-12)


def test_disconnected_raises():
    with pytest.raises(SingularNetwork):
        build_ptdf(_net([1, 2, 3], [(1, 2, 1.0)]))


def test_bad_slack():
    with pytest.raises(NetworkError):
        build_ptdf(triangle(), slack=9)


@pytest.mark.parametrize("line,msg", [
    ((1, 9, 1.0), "undeclared"),
    ((1, 2, -1.0), "susceptance"),
    ((1, 1, 1.0), "self-loop"),
])
def test_invalid_lines(line, msg):
    with pytest.raises(NetworkError, match=msg):
        _net([1, 2], [line])


def test_invalid_generator():
    with pytest.raises(NetworkError, match="rd <= 0"):
        _net([1, 2], [(1, 2, 1.0)], generators=[{"bus": 1, "cost": 1, "pmax": 5, "rd": 1.0}])
    with pytest.raises(NetworkError, match="pmin > pmax"):
        _net([1, 2], [(1, 2, 1.0)], generators=[{"bus": 1, "cost": 1, "pmin": 6, "pmax": 5}])


def test_incidence_maps():
    net = _net([1, 2, 3], [(1, 2, 1.0), (2, 3, 1.0)],
               generators=[{"bus": 2, "cost": 1, "pmax": 5}, {"bus": 2, "cost": 2, "pmax": 5}],
               loads=[{"bus": 3, "demand": 1.0}])
    Bg, Br, Bl = incidence_maps(net)
    np.testing.assert_array_equal(Bg[:, 0], [0, 1, 0])
    np.testing.assert_array_equal(Bg[:, 0], Bg[:, 1])
    assert Br.shape == (3, 0)
    np.testing.assert_array_equal(Bl[:, 0], [0, 0, 1])


def test_roundtrip_json(tmp_path, rng):
    net = random_network(rng)
    p = tmp_path / "net.json"
    p.write_text(json.dumps(net.to_dict()))
    back = load_network(p)
    np.testing.assert_array_equal(build_ptdf(back).entries, build_ptdf(net).entries)
    assert back.n_gen == net.n_gen and back.horizon == net.horizon
