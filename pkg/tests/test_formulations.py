import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_network, toy_network
from drlaed.bounds import ComponentBounds
from drlaed.errors import DimensionMismatch, Infeasible, InputError, SolverFailure
from drlaed.formulations import (METHODS, MethodSpec, build_master, build_robust_master, build_scenario,
                                problem_size, solve_dispatch)
from drlaed.grid import Network
from drlaed.lpsolve.model import LpSettings
from drlaed.lpsolve.solve import solve_lp
from drlaed.problem import CompactProblem, assemble, constraint_value
from drlaed.risk import AmbiguitySpec, SampleSet


def box(lo, hi):
    lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
    return ComponentBounds(lo, hi, np.zeros(lo.size), 0.1)


def toy():
    return assemble(toy_network())


def test_toy_oracle():
    sol = solve_dispatch(MethodSpec("deterministic-oracle", realized=[0.5]), toy())
    assert sol.x[0] == pytest.approx(1.0) and sol.objective == pytest.approx(1.0)


def test_toy_robust_box():
    spec = MethodSpec("drccp-robust", AmbiguitySpec(0.0, 0.1))
    sol = solve_dispatch(spec, toy(), box=box(0.3, 0.7))
    assert sol.x[0] == pytest.approx(1.2)


def test_toy_scenario():
    sol = solve_dispatch(MethodSpec("scenario"), toy(), SampleSet([[0.5], [0.3]]))
    assert sol.x[0] == pytest.approx(1.2)


def test_robust_vertex_substitution():
    cp = CompactProblem(c=[-1.0], A=[[1.0]], b=[10.0], D=[[1.0]], E=[[1.0, -1.0]], f=[2.0])
    lp = build_robust_master(cp, box([0.3, 0.3], [0.7, 0.7]))
    assert lp.b_ub[-1] == pytest.approx(1.6)
    assert solve_lp(lp).x[0] == pytest.approx(1.6)


def test_nonnegative_row_uses_upper_only(rng):
    cp = CompactProblem(c=[1.0], A=np.zeros((0, 1)), b=[], D=[[1.0]], E=[[1.0, 2.0]], f=[5.0])
    lp1 = build_robust_master(cp, box([0.0, 0.0], [1.0, 1.0]))
    lp2 = build_robust_master(cp, box([0.5, 0.9], [1.0, 1.0]))
    assert lp1.b_ub[-1] == lp2.b_ub[-1] == pytest.approx(2.0)


def test_degenerate_box_is_deterministic(rng):
    cp = assemble(random_network(rng, n_bus=4, horizon=2))
    w = rng.uniform(0, 10, cp.n_omega)
    robust = build_robust_master(cp, box(w, w))
    det = build_master(MethodSpec("deterministic-oracle", realized=w), cp)[0]
    np.testing.assert_allclose(robust.b_ub, det.b_ub, atol=1e-12)
    np.testing.assert_array_equal(robust.A_ub, det.A_ub)


def test_scenario_single_sample_is_deterministic(rng):
    cp = assemble(random_network(rng, n_bus=4, horizon=2))
    w = rng.uniform(0, 10, cp.n_omega)
    a = solve_dispatch(MethodSpec("scenario"), cp, SampleSet([w]))
    b = solve_dispatch(MethodSpec("deterministic-oracle", realized=w), cp)
    assert a.objective == pytest.approx(b.objective, rel=1e-9)


def copper_plate(T=3, n_res=2):
    return Network.from_dict({
        "buses": [1], "slack": 1, "horizon": T, "lines": [],
        "generators": [{"bus": 1, "cost": [10, 12, 11][:T], "pmax": 100, "p0": 20, "rd": -30, "ru": 30},
                       {"bus": 1, "cost": 30, "pmax": 100, "p0": 0}],
        "res": [{"bus": 1}] * n_res, "loads": [{"bus": 1, "demand": [50, 80, 60][:T]}],
    })


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 100_000), N=st.integers(1, 8))
def test_scenario_extreme_binds_when_signs_constant(seed, N):
    # one site, no lines: each row sees one nonpositive E entry, so the componentwise
    # minimum is the binding scenario
    cp = assemble(copper_plate(n_res=1))
    W = np.random.default_rng(seed).uniform(0, 20, (N, cp.n_omega))
    a = solve_dispatch(MethodSpec("scenario"), cp, SampleSet(W))
    b = solve_dispatch(MethodSpec("deterministic-oracle", realized=W.min(axis=0)), cp)
    assert a.objective == pytest.approx(b.objective, rel=1e-9)
    # with several sites the smallest per-period total binds instead
    cp = assemble(copper_plate(n_res=2))
    W = np.random.default_rng(seed).uniform(0, 20, (N, cp.n_omega))
    tot = W.reshape(N, 3, 2).sum(axis=2)
    worst = np.repeat(tot.min(axis=0) / 2, 2)
    a = solve_dispatch(MethodSpec("scenario"), cp, SampleSet(W))
    b = solve_dispatch(MethodSpec("deterministic-oracle", realized=worst), cp)
    assert a.objective == pytest.approx(b.objective, rel=1e-9)


def ladder_instance(seed):
    rng = np.random.default_rng(seed)
    cp = assemble(random_network(rng, n_bus=4, n_extra=1, n_res=2, horizon=2, fmax=(150, 300)))
    W = rng.uniform(0, 15, (8, cp.n_omega))
    return cp, W, rng


@pytest.mark.parametrize("seed", range(4))
def test_conservativeness_ladder(seed):
    cp, W, rng = ladder_instance(seed)
    mean = solve_dispatch(MethodSpec("deterministic-oracle", realized=W.mean(axis=0)), cp).objective
    scen = solve_dispatch(MethodSpec("scenario"), cp, SampleSet(W)).objective
    superset = np.vstack([W, rng.uniform(0, 15, (5, cp.n_omega))])
    worst = solve_dispatch(MethodSpec("worst-case"), cp, SampleSet(superset)).objective
    tol = 1e-8 * (1 + abs(worst))
    assert mean <= scen + tol <= worst + 2 * tol
    costs = []
    for theta in (0.0, 0.1, 0.3, 0.6):
        try:
            costs.append(solve_dispatch(MethodSpec("drccp-robust", AmbiguitySpec(theta, 0.4)), cp,
                                        SampleSet(W)).objective)
        except Infeasible:
            costs.append(np.inf)
    assert all(b >= a - tol for a, b in zip(costs, costs[1:]))


@pytest.mark.parametrize("seed", range(4))
def test_robust_solution_holds_on_box(seed):
    cp, W, rng = ladder_instance(seed)
    sol = solve_dispatch(MethodSpec("drccp-robust", AmbiguitySpec(0.05, 0.4)), cp, SampleSet(W))
    bx = sol.box
    inner = bx.lower + rng.uniform(0, 1, (5000, cp.n_omega)) * (bx.upper - bx.lower)
    assert np.all(constraint_value(cp, sol.x, inner) <= 1e-7)
    # the adversarial vertex per row is the tightest point of the box
    worst = np.maximum(cp.E, 0) @ bx.upper + np.minimum(cp.E, 0) @ bx.lower
    assert np.all(cp.D @ sol.x + worst - cp.f <= 1e-7)


@pytest.mark.parametrize("seed", range(4))
def test_robust_training_chance_at_radius_zero(seed):
    cp, W, _ = ladder_instance(seed)
    sol = solve_dispatch(MethodSpec("drccp-robust", AmbiguitySpec(0.0, 0.4)), cp, SampleSet(W))
    frac = np.mean(constraint_value(cp, sol.x, W) > 1e-7)
    assert frac <= sol.box.achieved.sum() + 1e-12 <= 0.4 + 1e-9


def test_infeasible_master_reports():
    cp = assemble(toy_network(pmax=1.0, demand=2.0))
    with pytest.raises(Infeasible) as exc:
        solve_dispatch(MethodSpec("scenario"), cp, SampleSet([[0.5]]))
    assert exc.value.method == "scenario"
    assert exc.value.solution.status == "infeasible"
    assert exc.value.solution.to_dict()["x"] is None


def test_iteration_cap_becomes_solver_failure(rng):
    cp = assemble(random_network(rng, n_bus=5, horizon=3))
    with pytest.raises(SolverFailure):
        solve_dispatch(MethodSpec("scenario"), cp, SampleSet(rng.uniform(0, 5, (3, cp.n_omega))),
                       settings=LpSettings(max_iter=1))


def test_method_spec_validation():
    with pytest.raises(InputError):
        MethodSpec("nope")
    with pytest.raises(InputError):
        MethodSpec("drcvp")
    with pytest.raises(InputError):
        MethodSpec("scenario", AmbiguitySpec(0.1, 0.1))
    with pytest.raises(InputError):
        MethodSpec("deterministic-oracle")
    with pytest.raises(InputError):
        MethodSpec("scenario", realized=[1.0])
    with pytest.raises(InputError):
        build_master(MethodSpec("scenario"), toy())


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        build_scenario(toy(), SampleSet([[1.0, 2.0]]))
    with pytest.raises(DimensionMismatch):
        build_robust_master(toy(), box([0.0, 0.0], [1.0, 1.0]))
    with pytest.raises(DimensionMismatch):
        solve_dispatch(MethodSpec("deterministic-oracle", realized=[1.0, 2.0]), toy())


def test_solution_dict():
    sol = solve_dispatch(MethodSpec("drcvp", AmbiguitySpec(0.05, 0.2)), toy(), SampleSet([[0.5], [0.3]]))
    d = sol.to_dict()
    assert set(d) == {"method", "theta", "alpha", "objective", "x", "status", "timings"}
    assert d["status"] == "optimal" and d["theta"] == 0.05 and len(d["x"]) == 1


@pytest.mark.parametrize("method", METHODS)
def test_problem_size_matches_build(method, rng):
    cp = assemble(random_network(rng, n_bus=4, horizon=2))
    S = SampleSet(rng.uniform(0, 5, (3, cp.n_omega)))
    amb = AmbiguitySpec(0.1, 0.2) if method in ("drcvp", "drccp-robust") else None
    spec = MethodSpec(method, amb, realized=S.samples[0] if method == "deterministic-oracle" else None)
    lp, _ = build_master(spec, cp, S)
    m_det = int(np.isfinite(cp.b).sum())
    size = problem_size(method, cp.n_x, cp.K, m_det, S.N, cp.n_omega)
    assert (lp.n_vars, lp.n_rows) == (size["variables"], size["constraints"])
    assert lp.group_size("uncertain") == size["uncertain_rows"]
