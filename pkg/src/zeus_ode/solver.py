"""Probability-flow ODE solvers on a uniform time grid.

Two production integrators consume whatever psi the caller supplies (fresh
or predicted), plus a Runge-Kutta reference that integrates the exact ODE
velocity at a fine resolution for ground truth:

- ``euler_step``: for the flow target this is plain Euler on dx = psi ds;
  for every other target it is the deterministic first-order exponential
  update x <- alpha' * x0_hat + sigma' * eps_hat (plain Euler on the VP
  drift is unstable near the data end).
- ``dpmpp2m_step``: the second-order multistep data-prediction update in
  log-SNR time; falls back to first order on the first step.
- ``reference_solve``: classical RK4 on the exact velocity
  d_alpha * E[x0|x] + d_sigma * E[eps|x], which equals the score form of
  the ODE but stays finite at both endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from zeus_ode.errors import PastEndOfTrajectoryError, ReferenceRequiresOracleError
from zeus_ode.oracle import DenoiserHandle, posterior_mean
from zeus_ode.parameterization import Parameterization, reconstruct_x0
from zeus_ode.schedule import Schedule, TimeGrid


@dataclass
class SolverState:
    """Current state x_hat_t plus up to two (lambda, x0_hat) history pairs."""

    x: np.ndarray
    t: int
    history: list[tuple[float, np.ndarray]] = field(default_factory=list)


def euler_step(
    state: SolverState,
    psi: np.ndarray,
    p: Parameterization,
    sched: Schedule,
    grid: TimeGrid,
) -> SolverState:
    if state.t < 1:
        raise PastEndOfTrajectoryError(f"cannot step from t={state.t}")
    t = state.t
    s_t, s_next = grid.s(t), grid.s(t - 1)
    if p.tag == "flow":
        x_new = state.x + (s_next - s_t) * psi
        return SolverState(x=x_new, t=t - 1, history=state.history)
    alpha, sigma, _, _ = sched.alpha_sigma(s_t)
    alpha_n, sigma_n, _, _ = sched.alpha_sigma(s_next)
    x0_hat = reconstruct_x0(p, state.x, psi, sched, s_t)
    eps_hat = (state.x - alpha * x0_hat) / sigma
    x_new = alpha_n * x0_hat + sigma_n * eps_hat
    return SolverState(x=x_new, t=t - 1, history=state.history)


def dpmpp2m_step(
    state: SolverState,
    psi: np.ndarray,
    p: Parameterization,
    sched: Schedule,
    grid: TimeGrid,
) -> SolverState:
    if state.t < 1:
        raise PastEndOfTrajectoryError(f"cannot step from t={state.t}")
    t = state.t
    s_t, s_next = grid.s(t), grid.s(t - 1)
    alpha, sigma, _, _ = sched.alpha_sigma(s_t)
    alpha_n, sigma_n, _, _ = sched.alpha_sigma(s_next)
    lam = sched.log_snr(s_t)
    x0_hat = reconstruct_x0(p, state.x, psi, sched, s_t)
    history = state.history + [(lam, x0_hat)]
    if sigma_n == 0.0:
        # sigma -> 0 limit of the update: the state collapses onto x0_hat.
        x_new = alpha_n * x0_hat
        return SolverState(x=x_new, t=t - 1, history=history[-2:])
    lam_n = sched.log_snr(s_next)
    h = lam_n - lam
    if len(state.history) >= 1:
        lam_prev, x0_prev = state.history[-1]
        h_prev = lam - lam_prev
        r = h_prev / h
        D = (1.0 + 1.0 / (2.0 * r)) * x0_hat - (1.0 / (2.0 * r)) * x0_prev
    else:
        D = x0_hat
    x_new = (sigma_n / sigma) * state.x - alpha_n * math.expm1(-h) * D
    return SolverState(x=x_new, t=t - 1, history=history[-2:])


STEP_FNS = {"euler": euler_step, "dpmpp2m": dpmpp2m_step}


def pf_ode_velocity(den: DenoiserHandle, x: np.ndarray, s: float) -> np.ndarray:
    """Exact ODE velocity dx/ds at (x, s) from the analytic posterior mean."""
    sched = den.sched
    alpha, sigma, d_alpha, d_sigma = sched.alpha_sigma(s)
    m = posterior_mean(den.gmm, x, sched, s)
    if sigma == 0.0:
        eps_hat = np.zeros_like(m)
    else:
        eps_hat = (x - alpha * m) / sigma
    return d_alpha * m + d_sigma * eps_hat


def reference_solve(
    den: DenoiserHandle,
    sched: Schedule,
    x_1: np.ndarray,
    fine_T: int,
    stop_s: float = 0.0,
) -> np.ndarray:
    """RK4 ground truth from s = 1 down to ``stop_s`` with fine_T steps."""
    if den.kind != "oracle":
        raise ReferenceRequiresOracleError(f"reference needs kind='oracle', got {den.kind!r}")
    if fine_T < 10:
        raise ValueError(f"fine_T={fine_T} too coarse")
    x = np.asarray(x_1, dtype=np.float64).copy()
    ds = -(1.0 - stop_s) / fine_T
    s = 1.0
    for _ in range(fine_T):
        k1 = pf_ode_velocity(den, x, s)
        k2 = pf_ode_velocity(den, x + 0.5 * ds * k1, s + 0.5 * ds)
        k3 = pf_ode_velocity(den, x + 0.5 * ds * k2, s + 0.5 * ds)
        k4 = pf_ode_velocity(den, x + ds * k3, max(s + ds, stop_s))
        x = x + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += ds
    return x
