import numpy as np
import pytest

from zeus_ode import (
    Parameterization,
    PredictorStrategy,
    full_plan,
    make_grid,
    make_step_plan,
    observe,
    oracle_denoiser,
    predict,
    run_accelerated,
)
from zeus_ode.errors import HistoryUnderflowError, InvalidPlanError
from zeus_ode.metrics import mse
from zeus_ode.skipper import FULL, Predictor

P_EPS = Parameterization("epsilon")
ZEUS = PredictorStrategy.parse("zeus")
REUSE = PredictorStrategy.parse("reuse")
CHAIN = PredictorStrategy.parse("chain")


def _brute_force_fresh_count(T, r, warm_frac, cool_frac):
    # Independent tiling oracle: simulate the block layout step by step.
    import math

    warm = math.floor(warm_frac * T + 0.5)
    cool = math.floor(cool_frac * T + 0.5)
    mid = T - warm - cool
    count = warm + cool
    pos = 0
    while pos < mid:
        count += 1  # block leader
        pos += 1 + min(r, mid - pos - 1) if pos + 1 <= mid else 1
    return count


# --- plans ------------------------------------------------------------------


def test_plan_nfe_anchor_t50_r2():
    plan = make_step_plan(50, 2, 0.2, 0.1)
    assert plan.n_full == 27
    assert plan.T == 50
    assert 50 / plan.n_full == pytest.approx(1.8519, abs=1e-4)


def test_plan_t50_r3():
    plan = make_step_plan(50, 3, 0.2, 0.1)
    assert plan.n_full == _brute_force_fresh_count(50, 3, 0.2, 0.1) == 24


def test_plan_r1_alternates():
    import math

    for T in (10, 11, 50):
        plan = make_step_plan(T, 1, 0.0, 0.0)
        assert plan.n_full == math.ceil(T / 2)
        assert all(int(v) == (i % 2) for i, v in enumerate(plan.labels))


def test_plan_structure_invariants(rng):
    for _ in range(200):
        T = int(rng.integers(10, 200))
        r = int(rng.integers(1, 5))
        if T < r + 2:
            continue
        warm = float(rng.uniform(0, 0.4))
        cool = float(rng.uniform(0, 0.4))
        plan = make_step_plan(T, r, warm, cool)
        labels = plan.labels
        assert labels[0] == FULL
        # Every Reduced(j) has a Full exactly j positions earlier.
        for i, lab in enumerate(labels):
            if lab != FULL:
                assert labels[i - lab] == FULL
                assert lab <= r
        # Inside the skip region full steps are exactly r+1 apart.
        lo, hi = plan.skip_region()
        fulls = [i for i in range(lo, hi) if labels[i] == FULL]
        gaps = np.diff(fulls)
        assert all(g == r + 1 for g in gaps[:-1])  # trailing block may be short
        if len(gaps):
            assert gaps[-1] <= r + 1


def test_plan_pigeonhole_r_ge_2(rng):
    # No two adjacent Full labels inside the skip region when r >= 2.
    for _ in range(1000):
        T = int(rng.integers(12, 300))
        r = int(rng.integers(2, 5))
        warm = float(rng.uniform(0, 0.35))
        cool = float(rng.uniform(0, 0.35))
        plan = make_step_plan(T, r, warm, cool)
        lo, hi = plan.skip_region()
        inner = plan.labels[lo:hi]
        fulls = inner == FULL
        assert not np.any(fulls[:-1] & fulls[1:])
        # At most one fresh step in every 3-step window.
        for i in range(len(inner) - 2):
            assert fulls[i : i + 3].sum() <= 1


def test_plan_validation():
    with pytest.raises(InvalidPlanError):
        make_step_plan(50, 2, 0.6, 0.5)
    with pytest.raises(InvalidPlanError):
        make_step_plan(3, 2, 0.0, 0.0)
    with pytest.raises(InvalidPlanError):
        make_step_plan(50, 0, 0.1, 0.1)


# --- observe / predict -------------------------------------------------------


def test_observe_basic():
    info = observe(np.array([3.0, 1.0]), np.array([1.0, 1.0]), 7)
    np.testing.assert_array_equal(info.delta, [2.0, 0.0])
    np.testing.assert_array_equal(info.psi, [3.0, 1.0])
    assert info.anchor_t == 7


def test_observe_equal_gives_zero_delta():
    psi = np.array([0.5, -0.25])
    info = observe(psi, psi.copy(), 3)
    np.testing.assert_array_equal(info.delta, [0.0, 0.0])


def test_observe_first_full_step():
    info = observe(np.array([1.0, 2.0]), None, 50)
    np.testing.assert_array_equal(info.delta, [0.0, 0.0])


def test_predict_zeus_zigzag():
    info = observe(np.array([1.0]), np.array([0.5]), 5)  # delta = 0.5
    assert predict(ZEUS, info, 1) == pytest.approx([1.5])
    assert predict(ZEUS, info, 2) == pytest.approx([1.0])
    assert predict(ZEUS, info, 3) == pytest.approx([1.5])


def test_predict_chain_closed_form():
    info = observe(np.array([1.0]), np.array([0.5]), 5)
    # (j+1) psi - j psi_hat_prev with psi_hat_prev = 0.5
    assert predict(CHAIN, info, 3) == pytest.approx([2.5])


def test_predict_reuse():
    info = observe(np.array([2.0]), np.array([7.0]), 5)
    for j in (1, 2, 3, 4):
        assert predict(REUSE, info, j) == pytest.approx([2.0])


def test_predict_strategies_coincide_at_j1():
    psi, prev = np.array([1.0]), np.array([0.5])
    info = observe(psi, prev, 5)
    expected = 2 * psi - prev
    assert predict(ZEUS, info, 1) == pytest.approx(expected)
    assert predict(CHAIN, info, 1) == pytest.approx(expected)
    lag1 = PredictorStrategy.parse("lagrange:1")
    assert predict(lag1, info, 1, history=[psi, prev]) == pytest.approx(expected)


def test_predict_lagrange_history_underflow():
    info = observe(np.array([1.0]), None, 5)
    with pytest.raises(HistoryUnderflowError):
        predict(PredictorStrategy.parse("lagrange:2"), info, 1, history=[np.array([1.0])])


def test_zeus_even_j_equals_reuse_bitwise(rng):
    psi = rng.standard_normal(4)
    prev = rng.standard_normal(4)
    info = observe(psi, prev, 9)
    assert np.array_equal(predict(ZEUS, info, 2), predict(REUSE, info, 2))
    assert np.array_equal(predict(ZEUS, info, 1), predict(CHAIN, info, 1))


def test_strategy_parse():
    assert PredictorStrategy.parse("lagrange:3").k == 3
    with pytest.raises(ValueError):
        PredictorStrategy.parse("lagrange:9")
    with pytest.raises(ValueError):
        PredictorStrategy.parse("taylor")


# --- run_accelerated ---------------------------------------------------------


def test_all_full_plan_equals_direct_solve(vp_linear, gmm_2d, rng):
    from zeus_ode import SolverState, dpmpp2m_step

    T = 30
    grid = make_grid(T)
    x1 = rng.standard_normal(2)
    den = oracle_denoiser(gmm_2d, vp_linear, P_EPS)
    traj = run_accelerated(den, full_plan(T), ZEUS, "dpmpp2m", P_EPS, vp_linear, grid, x1)
    den2 = oracle_denoiser(gmm_2d, vp_linear, P_EPS)
    state = SolverState(x=x1.copy(), t=T)
    for t in range(T, 0, -1):
        psi = den2.evaluate(state.x, grid.s(t), t)
        state = dpmpp2m_step(state, psi, P_EPS, vp_linear, grid)
    assert np.array_equal(traj.final_state, state.x)
    assert traj.nfe == T


def test_call_counter_equals_full_labels(vp_linear, gmm_2d, rng):
    T = 50
    plan = make_step_plan(T, 2, 0.2, 0.1)
    den = oracle_denoiser(gmm_2d, vp_linear, P_EPS)
    traj = run_accelerated(
        den, plan, ZEUS, "euler", P_EPS, vp_linear, make_grid(T), rng.standard_normal(2)
    )
    assert den.call_counter == plan.n_full == traj.nfe == 27


def test_run_deterministic(vp_linear, gmm_2d, rng):
    T = 40
    plan = make_step_plan(T, 3, 0.2, 0.1)
    x1 = rng.standard_normal(2)
    outs = []
    for _ in range(2):
        den = oracle_denoiser(gmm_2d, vp_linear, P_EPS)
        traj = run_accelerated(den, plan, ZEUS, "dpmpp2m", P_EPS, vp_linear, make_grid(T), x1)
        outs.append(traj.final_state)
    assert np.array_equal(outs[0], outs[1])


def test_zeus_beats_reuse_r1(vp_linear, gmm_2d):
    # Monte-Carlo direction check: at r=1 the interleave's j=1 extrapolation
    # should beat pure reuse on most seeds.
    T = 50
    plan = make_step_plan(T, 1, 0.2, 0.1)
    grid = make_grid(T)
    wins = 0
    n = 100
    for seed in range(n):
        x1 = np.random.default_rng(seed).standard_normal(2)
        base = run_accelerated(
            oracle_denoiser(gmm_2d, vp_linear, P_EPS), full_plan(T), REUSE,
            "dpmpp2m", P_EPS, vp_linear, grid, x1,
        )
        z = run_accelerated(
            oracle_denoiser(gmm_2d, vp_linear, P_EPS), plan, ZEUS,
            "dpmpp2m", P_EPS, vp_linear, grid, x1,
        )
        ru = run_accelerated(
            oracle_denoiser(gmm_2d, vp_linear, P_EPS), plan, REUSE,
            "dpmpp2m", P_EPS, vp_linear, grid, x1,
        )
        if mse(z.final_state, base.final_state) < mse(ru.final_state, base.final_state):
            wins += 1
    assert wins >= 80


def test_predictor_retains_two_vectors(vp_linear, gmm_2d, rng):
    counts = set()

    def inspect(predictor: Predictor, t: int):
        counts.add(predictor.retained_vector_count)

    for T in (50, 120):
        for r in (1, 2, 3, 4):
            plan = make_step_plan(T, r, 0.2, 0.1)
            run_accelerated(
                oracle_denoiser(gmm_2d, vp_linear, P_EPS), plan, ZEUS, "euler",
                P_EPS, vp_linear, make_grid(T), rng.standard_normal(2), inspect=inspect,
            )
    assert counts == {2}


def test_lagrange_history_fills_and_degrades(vp_linear, gmm_2d, rng):
    # With no warm-up, the first blocks run at reduced order, then the
    # history caps at k+1 entries.
    T = 50
    plan = make_step_plan(T, 2, 0.0, 0.0)
    lag2 = PredictorStrategy.parse("lagrange:2")
    max_count = 0

    def inspect(predictor: Predictor, t: int):
        nonlocal max_count
        max_count = max(max_count, predictor.retained_vector_count)

    traj = run_accelerated(
        oracle_denoiser(gmm_2d, vp_linear, P_EPS), plan, lag2, "euler",
        P_EPS, vp_linear, make_grid(T), rng.standard_normal(2), inspect=inspect,
    )
    assert traj.nfe == plan.n_full
    assert max_count == 2 + 3  # observed pair + k+1 history entries
