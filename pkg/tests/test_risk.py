import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_network
from oracles import drcvp_argmin_1d
from drlaed.errors import DimensionMismatch, EmptyInput, InputError, UnsupportedNorm
from drlaed.lpsolve.solve import solve_lp
from drlaed.problem import CompactProblem, assemble, constraint_value
from drlaed.risk import (AmbiguitySpec, SampleSet, build_drcvp, drcvp_size, dual_norm,
                         empirical_cvar, normalize_norm)


def scalar_problem(d=-1.0, e=1.0, f=0.0):
    """``min x`` subject to the scalar uncertain row ``d x + e w <= f``."""
    return CompactProblem(c=[1.0], A=np.zeros((0, 1)), b=[], D=[[d]], E=[[e]], f=[f])


def solve_x(cp, samples, amb):
    sol = solve_lp(build_drcvp(cp, SampleSet(np.asarray(samples, float).reshape(-1, cp.n_omega)), amb))
    assert sol.status == "optimal"
    return sol


@pytest.mark.parametrize("values,alpha,expected", [
    ([2.0, 2.0, 2.0], 0.3, 2.0),
    ([1, 2, 3, 4], 0.5, 3.5),
    ([0, 1], 0.5, 1.0),
])
def test_empirical_cvar(values, alpha, expected):
    assert empirical_cvar(values, alpha) == pytest.approx(expected)


def test_empirical_cvar_errors():
    with pytest.raises(EmptyInput):
        empirical_cvar([], 0.5)
    with pytest.raises(InputError):
        empirical_cvar([1.0], 1.0)


@pytest.mark.parametrize("norm", ["linf", "l1"])
@pytest.mark.parametrize("theta,support,expected", [
    (0.0, False, 1.0),
    (0.1, False, 1.2),
    (10.0, True, 1.0),
])
def test_scalar_examples(norm, theta, support, expected):
    G, h = ([[1.0], [-1.0]], [1.0, 0.0]) if support else (None, None)
    sol = solve_x(scalar_problem(), [0.0, 1.0], AmbiguitySpec(theta, 0.5, norm, G, h))
    assert sol.x[0] == pytest.approx(expected, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(1, 5), supported=st.booleans())
def test_scalar_matches_dual_oracle(seed, n, supported):
    rng = np.random.default_rng(seed)
    w = np.round(rng.uniform(0, 1, n), 3)
    e = float(rng.choice([-1, 1]) * rng.uniform(0.5, 2))
    f = float(rng.uniform(-1, 1))
    theta = float(rng.uniform(0, 0.3))
    alpha = float(rng.uniform(0.05, 0.6))
    lo, hi = (0.0, 1.0) if supported else (-np.inf, np.inf)
    G, h = ([[1.0], [-1.0]], [1.0, 0.0]) if supported else (None, None)
    x = solve_x(scalar_problem(-1.0, e, f), w, AmbiguitySpec(theta, alpha, "linf", G, h)).x[0]
    ref = drcvp_argmin_1d(-1.0, e, f, w, theta, alpha, lo, hi)
    assert x == pytest.approx(ref, rel=1e-6, abs=1e-6)


def network_instance(seed, N=6):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n_bus=4, n_extra=1, n_gen=3, n_res=2, horizon=2, fmax=(150, 300))
    cp = assemble(net)
    W = rng.uniform(0, 15, (N, cp.n_omega))
    return cp, SampleSet(W)


def cost(cp, samples, amb):
    sol = solve_lp(build_drcvp(cp, samples, amb))
    return sol.objective if sol.status == "optimal" else np.inf, sol


@pytest.mark.parametrize("seed", range(4))
def test_cost_monotone_in_theta(seed):
    cp, S = network_instance(seed)
    costs = [cost(cp, S, AmbiguitySpec(th, 0.2))[0] for th in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b >= a - 1e-7 * (1 + abs(a)) for a, b in zip(costs, costs[1:]))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 100_000), alpha=st.sampled_from([0.1, 0.2, 0.34, 0.5]))
def test_cvar_bounds_training_violation(seed, alpha):
    cp, S = network_instance(seed, N=8)
    c, sol = cost(cp, S, AmbiguitySpec(0.0, alpha))
    if sol.status != "optimal":
        return
    z = constraint_value(cp, sol.x[:cp.n_x], S.samples)
    assert np.mean(z > 1e-7) <= alpha


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("norm", ["linf", "l1"])
def test_support_never_costs_more(seed, norm):
    cp, S = network_instance(seed)
    n = cp.n_omega
    G = np.vstack([np.eye(n), -np.eye(n)])
    h = np.concatenate([np.full(n, 20.0), np.zeros(n)])
    free, _ = cost(cp, S, AmbiguitySpec(1.0, 0.2, norm))
    boxed, _ = cost(cp, S, AmbiguitySpec(1.0, 0.2, norm, G, h))
    assert boxed <= free + 1e-7 * (1 + abs(free))


@pytest.mark.parametrize("norm", ["linf", "l1"])
@pytest.mark.parametrize("support", [False, True])
def test_size_formula(norm, support):
    cp, S = network_instance(0, N=3)
    n = cp.n_omega
    G = np.vstack([np.eye(n), -np.eye(n)]) if support else None
    h = np.concatenate([np.full(n, 20.0), np.zeros(n)]) if support else None
    lp = build_drcvp(cp, S, AmbiguitySpec(0.3, 0.1, norm, G, h))
    m_det = int(np.isfinite(cp.b).sum())
    size = drcvp_size(cp.n_x, cp.K, m_det, S.N, n, 0 if G is None else G.shape[0], norm)
    assert lp.n_vars == size["variables"]
    assert lp.n_rows == size["constraints"]
    assert lp.group_size("uncertain") == S.N * cp.K


def test_size_without_support_matches_scale():
    # x, lam, t and one s per sample
    assert [drcvp_size(1296, 8952, 5076, N)["variables"] for N in (10, 50, 200)] == [1308, 1348, 1498]


def test_l1_and_linf_differ_in_many_dimensions():
    cp = CompactProblem(c=[1.0], A=np.zeros((0, 1)), b=[], D=[[-1.0]], E=[[1.0, 1.0]], f=[0.0])
    W = [[0.0, 0.0], [1.0, 1.0]]
    x_inf = solve_x(cp, W, AmbiguitySpec(0.1, 0.5, "linf")).x[0]
    x_one = solve_x(cp, W, AmbiguitySpec(0.1, 0.5, "l1")).x[0]
    # CVaR 2 plus theta * ||e||_* / alpha: l1 dual of linf gives 2, linf dual of l1 gives 1
    assert x_inf == pytest.approx(2.4, abs=1e-8)
    assert x_one == pytest.approx(2.2, abs=1e-8)


def test_norm_helpers():
    assert normalize_norm("INF") == "linf"
    assert normalize_norm("1") == "l1"
    assert dual_norm([1.0, -2.0], "linf") == 3.0
    assert dual_norm([1.0, -2.0], "l1") == 2.0
    with pytest.raises(UnsupportedNorm):
        normalize_norm("l2")


def test_ambiguity_validation():
    with pytest.raises(InputError):
        AmbiguitySpec(0.1, 0.0)
    with pytest.raises(InputError):
        AmbiguitySpec(-0.1, 0.5)
    with pytest.raises(InputError):
        AmbiguitySpec(0.1, 0.5, G=[[1.0]])
    with pytest.raises(DimensionMismatch):
        AmbiguitySpec(0.1, 0.5, G=[[1.0], [-1.0]], h=[1.0])
    amb = AmbiguitySpec(0.1, 0.5, G=[[1.0], [-1.0]], h=[1.0, 0.0])
    amb.check_samples(np.array([[1.0 + 5e-10]]))
    with pytest.raises(InputError, match="outside"):
        amb.check_samples(np.array([[1.1]]))
    with pytest.raises(InputError):
        build_drcvp(scalar_problem(), SampleSet([[2.0]]), amb)


def test_sample_set_validation():
    with pytest.raises(InputError):
        SampleSet([[-1.0]])
    with pytest.raises(InputError):
        SampleSet([[np.nan]])
    with pytest.raises(DimensionMismatch):
        SampleSet([[1.0, 2.0]], ["a"])
    S = SampleSet([[1.0], [2.0], [3.0]])
    assert S.subset([0, 2]).samples.ravel().tolist() == [1.0, 3.0]
    with pytest.raises(DimensionMismatch):
        build_drcvp(scalar_problem(), SampleSet([[1.0, 2.0]]), AmbiguitySpec(0.1, 0.5))
