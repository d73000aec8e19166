import numpy as np
import pytest

from zeus_ode import (
    GaussianMixture,
    Parameterization,
    Schedule,
    SolverState,
    dpmpp2m_step,
    euler_step,
    make_grid,
    oracle_denoiser,
    reference_solve,
)
from zeus_ode.analysis import solver_order_probe
from zeus_ode.errors import PastEndOfTrajectoryError, ReferenceRequiresOracleError
from zeus_ode.oracle import noisy_denoiser
from zeus_ode.parameterization import TAGS, target_coeffs

P_EPS = Parameterization("epsilon")
P_FLOW = Parameterization("flow")


def test_euler_flow_constant_velocity_exact(rectified_flow):
    grid = make_grid(10)
    c = np.array([0.7, -0.3])
    state = SolverState(x=np.zeros(2), t=10)
    for _ in range(10):
        state = euler_step(state, c, P_FLOW, rectified_flow, grid)
    # ds = -1 in total, so the state moved by -c exactly.
    np.testing.assert_allclose(state.x, -c, atol=1e-15)


def test_euler_epsilon_with_true_noise_lands_on_path(vp_linear):
    grid = make_grid(50)
    t = 30
    s_t, s_n = grid.s(t), grid.s(t - 1)
    a, sg, _, _ = vp_linear.alpha_sigma(s_t)
    an, sgn, _, _ = vp_linear.alpha_sigma(s_n)
    x0, eps = np.array([1.2]), np.array([-0.4])
    state = SolverState(x=a * x0 + sg * eps, t=t)
    out = euler_step(state, eps, P_EPS, vp_linear, grid)
    np.testing.assert_allclose(out.x, an * x0 + sgn * eps, atol=1e-14)


def test_euler_error_halves_when_T_doubles(vp_linear, single_gaussian_1d):
    den = oracle_denoiser(single_gaussian_1d, vp_linear, P_EPS)
    x1 = np.array([0.9])
    ref = reference_solve(den, vp_linear, x1, 2000, stop_s=0.2)
    errs = []
    for T in (50, 100):
        grid = make_grid(T)
        state = SolverState(x=x1.copy(), t=T)
        for t in range(T, round(0.2 * T), -1):
            psi = den.evaluate(state.x, grid.s(t), t)
            state = euler_step(state, psi, P_EPS, vp_linear, grid)
        errs.append(float(np.abs(state.x - ref).max()))
    ratio = errs[0] / errs[1]
    assert 1.7 <= ratio <= 2.3


def test_dpmpp2m_first_step_is_first_order(vp_linear, rng):
    grid = make_grid(20)
    x = rng.standard_normal(2)
    psi = rng.standard_normal(2)
    state = SolverState(x=x.copy(), t=20)
    out = dpmpp2m_step(state, psi, P_EPS, vp_linear, grid)
    # Manual first-order exponential update.
    import math

    s_t, s_n = grid.s(20), grid.s(19)
    a, sg, _, _ = vp_linear.alpha_sigma(s_t)
    an, sgn, _, _ = vp_linear.alpha_sigma(s_n)
    lam, lam_n = vp_linear.log_snr(s_t), vp_linear.log_snr(s_n)
    x0_hat = (x - sg * psi) / a
    expected = (sgn / sg) * x - an * math.expm1(-(lam_n - lam)) * x0_hat
    np.testing.assert_allclose(out.x, expected, atol=1e-14)
    assert len(out.history) == 1


def test_dpmpp2m_constant_x0_gives_D_equal_x0(vp_linear):
    # If x0_hat is the same at both steps, D == x0_hat regardless of r:
    # the two-step update then equals the one-step exponential update.
    import math

    grid = make_grid(20)
    x0_const = np.array([1.3])
    s_t = grid.s(18)
    a, sg, _, _ = vp_linear.alpha_sigma(s_t)
    x = a * x0_const + sg * np.array([0.2])
    psi = (x - a * x0_const) / sg  # epsilon implied by the constant x0
    state = SolverState(x=x.copy(), t=18, history=[(vp_linear.log_snr(grid.s(19)), x0_const.copy())])
    out = dpmpp2m_step(state, psi, P_EPS, vp_linear, grid)
    s_n = grid.s(17)
    an, sgn, _, _ = vp_linear.alpha_sigma(s_n)
    lam, lam_n = vp_linear.log_snr(s_t), vp_linear.log_snr(s_n)
    expected = (sgn / sg) * x - an * math.expm1(-(lam_n - lam)) * x0_const
    np.testing.assert_allclose(out.x, expected, atol=1e-14)


def test_steps_deterministic(vp_linear, gmm_2d, rng):
    den = oracle_denoiser(gmm_2d, vp_linear, P_EPS)
    grid = make_grid(30)
    x = rng.standard_normal(2)
    outs = []
    for _ in range(2):
        state = SolverState(x=x.copy(), t=30)
        psi = den.evaluate(state.x, grid.s(30), 30)
        state = dpmpp2m_step(state, psi, P_EPS, vp_linear, grid)
        outs.append(state.x)
    assert np.array_equal(outs[0], outs[1])


def test_step_past_end_raises(vp_linear, rng):
    state = SolverState(x=rng.standard_normal(2), t=0)
    with pytest.raises(PastEndOfTrajectoryError):
        euler_step(state, np.zeros(2), P_EPS, vp_linear, make_grid(10))


def test_reference_self_consistency(vp_linear, single_gaussian_1d):
    # Checked at the interior node where the reference serves as ground
    # truth; at s=0 the velocity loses Lipschitz continuity (d_sigma ~
    # 1/sqrt(s)) and RK4 degrades to first order there.
    den = oracle_denoiser(single_gaussian_1d, vp_linear, P_EPS)
    x1 = np.array([-0.3])
    a = reference_solve(den, vp_linear, x1, 2000, stop_s=0.2)
    b = reference_solve(den, vp_linear, x1, 4000, stop_s=0.2)
    assert np.abs(a - b).max() < 1e-8


def test_reference_collinearity_standard_normal(vp_linear):
    # With N(0,1) data under VP the ODE is linear: x(s) stays collinear
    # with x(1).
    gmm = GaussianMixture([1.0], [[0.0, 0.0]], [1.0])
    den = oracle_denoiser(gmm, vp_linear, P_EPS)
    x1 = np.array([0.6, -0.8])
    out = reference_solve(den, vp_linear, x1, 1500, stop_s=0.3)
    cross = out[0] * x1[1] - out[1] * x1[0]
    assert abs(cross) < 1e-8


def test_reference_zero_state_symmetric_data(vp_linear):
    gmm = GaussianMixture([0.5, 0.5], [[1.0], [-1.0]], [0.3, 0.3])
    den = oracle_denoiser(gmm, vp_linear, P_EPS)
    out = reference_solve(den, vp_linear, np.zeros(1), 1000)
    np.testing.assert_allclose(out, [0.0], atol=1e-12)


def test_reference_rejects_noisy_denoiser(vp_linear, single_gaussian_1d):
    den = noisy_denoiser(single_gaussian_1d, vp_linear, P_EPS, 0.1)
    with pytest.raises(ReferenceRequiresOracleError):
        reference_solve(den, vp_linear, np.zeros(1), 100)


def test_parameterization_invariance_dpmpp2m(vp_linear, gmm_2d, rng):
    # The oracle's psi in any target, fed to the data-prediction update,
    # yields the same trajectory.
    T = 40
    grid = make_grid(T)
    x1 = rng.standard_normal(2)
    finals = []
    for tag in TAGS:
        p = Parameterization(tag)
        den = oracle_denoiser(gmm_2d, vp_linear, p)
        state = SolverState(x=x1.copy(), t=T)
        for t in range(T, 0, -1):
            psi = den.evaluate(state.x, grid.s(t), t)
            state = dpmpp2m_step(state, psi, p, vp_linear, grid)
        finals.append(state.x)
    for out in finals[1:]:
        np.testing.assert_allclose(out, finals[0], atol=1e-10)


def test_parameterization_invariance_euler_exponential(vp_linear, gmm_2d, rng):
    # Same check for the exponential-form Euler across the four targets it
    # serves (the flow target uses the plain-Euler branch by construction).
    T = 40
    grid = make_grid(T)
    x1 = rng.standard_normal(2)
    finals = []
    for tag in ("epsilon", "x0", "v", "score"):
        p = Parameterization(tag)
        den = oracle_denoiser(gmm_2d, vp_linear, p)
        state = SolverState(x=x1.copy(), t=T)
        for t in range(T, 0, -1):
            psi = den.evaluate(state.x, grid.s(t), t)
            state = euler_step(state, psi, p, vp_linear, grid)
        finals.append(state.x)
    for out in finals[1:]:
        np.testing.assert_allclose(out, finals[0], atol=1e-10)


def test_solver_orders(vp_linear, single_gaussian_1d):
    x1 = np.array([0.9])
    _, order_euler = solver_order_probe("euler", vp_linear, single_gaussian_1d, x1)
    assert order_euler == pytest.approx(1.0, abs=0.15)
    _, order_2m = solver_order_probe("dpmpp2m", vp_linear, single_gaussian_1d, x1)
    assert order_2m == pytest.approx(2.0, abs=0.25)


def test_rf_dpmpp2m_final_step_collapses_to_x0(rectified_flow, rng):
    # sigma(0) == 0 on the rectified path: the last update returns x0_hat.
    grid = make_grid(10)
    x = rng.standard_normal(2)
    psi = rng.standard_normal(2)
    state = SolverState(x=x.copy(), t=1)
    out = dpmpp2m_step(state, psi, P_FLOW, rectified_flow, grid)
    s1 = grid.s(1)
    u, v = target_coeffs(P_FLOW, rectified_flow, s1)
    from zeus_ode import reconstruct_x0

    np.testing.assert_allclose(out.x, reconstruct_x0(P_FLOW, x, psi, rectified_flow, s1), atol=1e-14)
