"""Numerical verification of the estimator theory behind the skipper.

Covers: GLS/BLUE weights for two-point extrapolation, exact Lagrange
extrapolation weights and their norm growth, closed-form bias/variance of
the three multi-step strategies against Monte-Carlo, the two-point minimax
witness pair, achievability bounds, Lebesgue-constant growth for equispaced
vs Chebyshev nodes, and the population trend of each prediction target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from zeus_ode.errors import GlsSingularError
from zeus_ode.oracle import GaussianMixture, oracle_denoiser
from zeus_ode.parameterization import Parameterization
from zeus_ode.schedule import Schedule

# ---------------------------------------------------------------------------
# BLUE / GLS weights
# ---------------------------------------------------------------------------


def blue_weights(
    node_a: float, node_b: float, target: float, cov: np.ndarray
) -> tuple[float, float]:
    """Minimum-variance weights unbiased for all affine trends.

    Solves min w' cov w subject to X' w = c with X = [[1, a], [1, b]]' and
    c = (1, target) via the GLS closed form w' = c'(X' S^-1 X)^-1 X' S^-1.
    With two nodes the constraint set is a single point, so the result is
    covariance-independent: (2, -1) for nodes (s, s+D) and target s-D.
    """
    if node_a == node_b:
        raise ValueError("nodes must be distinct")
    cov = np.asarray(cov, dtype=np.float64)
    if cov.shape != (2, 2):
        raise ValueError(f"cov must be 2x2, got {cov.shape}")
    if not np.allclose(cov, cov.T):
        raise GlsSingularError("covariance must be symmetric")
    try:
        eig = np.linalg.eigvalsh(cov)
        if eig.min() <= 0:
            raise GlsSingularError(f"covariance not positive definite: eig={eig}")
        cov_inv = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise GlsSingularError(str(exc)) from exc
    # Centered abscissae: the problem is translation invariant and the
    # shifted system stays well conditioned for small node spacing.
    c0 = 0.5 * (node_a + node_b)
    X = np.array([[1.0, node_a - c0], [1.0, node_b - c0]])
    c = np.array([1.0, target - c0])
    w = cov_inv @ X @ np.linalg.solve(X.T @ cov_inv @ X, c)
    return float(w[0]), float(w[1])


# ---------------------------------------------------------------------------
# Lagrange extrapolation weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    nodes: np.ndarray
    target: float
    weights: np.ndarray
    exact: tuple = ()  # exact rational weights, when integer arithmetic applies


def lagrange_basis_at(nodes, x: float) -> np.ndarray:
    """ell_j(x) for arbitrary distinct nodes (float evaluation)."""
    nodes = np.asarray(nodes, dtype=np.float64)
    out = np.empty(len(nodes))
    for j in range(len(nodes)):
        num = 1.0
        for m in range(len(nodes)):
            if m != j:
                num *= (x - nodes[m]) / (nodes[j] - nodes[m])
        out[j] = num
    return out


def lagrange_weights(k: int, offset: int) -> WeightVector:
    """Extrapolation weights over equispaced nodes {0..k} at x = -offset.

    Evaluated in exact rational arithmetic; at offset 1 the weights are
    (-1)^j * binom(k+1, j+1).
    """
    if not 1 <= k <= 6:
        raise ValueError(f"k={k} outside [1, 6]")
    if offset < 1:
        raise ValueError(f"offset={offset}; need >= 1")
    x = Fraction(-offset)
    exact = []
    for j in range(k + 1):
        w = Fraction(1)
        for m in range(k + 1):
            if m != j:
                w *= (x - m) / Fraction(j - m)
        exact.append(w)
    return WeightVector(
        nodes=np.arange(k + 1, dtype=np.float64),
        target=float(-offset),
        weights=np.array([float(w) for w in exact]),
        exact=tuple(exact),
    )


def weight_norm_sq(k: int) -> int:
    """||w||^2 at offset 1; equals binom(2k+2, k+1) - 1 for k in [1, 6]."""
    wv = lagrange_weights(k, 1)
    total = sum(w * w for w in wv.exact)
    assert total.denominator == 1
    return int(total)


# ---------------------------------------------------------------------------
# Bias / variance of the three multi-step strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Scalar trend with exact derivatives, for bias/variance checks."""

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f: Callable[[float], float]


SIN = TestFunction("sin", math.sin, math.cos, lambda s: -math.sin(s))
EXP = TestFunction("exp", math.exp, math.exp, math.exp)
CUBIC = TestFunction(
    "cubic",
    lambda s: 2.0 * s**3 - s**2 + 0.5 * s + 0.3,
    lambda s: 6.0 * s**2 - 2.0 * s + 0.5,
    lambda s: 12.0 * s - 2.0,
)
TEST_FUNCTIONS = (SIN, EXP, CUBIC)

_STRATEGY_WEIGHTS = {
    # weights (w0, w1) on (psi_t, psi_{t+1}) for a jump of j
    "chain": lambda j: (j + 1.0, -float(j)),
    "zeus": lambda j: (2.0, -1.0) if j % 2 == 1 else (1.0, 0.0),
    "reuse": lambda j: (1.0, 0.0),
}


def predicted_bias(strategy: str, phi: TestFunction, s_t: float, delta: float, j: int) -> float:
    """Closed-form leading bias terms at the anchor s_t.

    chain: -j(j+1)/2 * phi'' D^2;  reuse: j phi' D - j^2/2 phi'' D^2;
    zeus even j=2k: 2k phi' D - 2k^2 phi'' D^2;
    zeus odd j=2k+1: 2k phi' D - (2k^2+2k+1) phi'' D^2.
    """
    d1, d2 = phi.df(s_t), phi.d2f(s_t)
    if strategy == "chain":
        return -0.5 * j * (j + 1) * d2 * delta**2
    if strategy == "reuse":
        return j * d1 * delta - 0.5 * j * j * d2 * delta**2
    if strategy == "zeus":
        if j % 2 == 0:
            k = j // 2
            return 2 * k * d1 * delta - 2 * k * k * d2 * delta**2
        k = (j - 1) // 2
        return 2 * k * d1 * delta - (2 * k * k + 2 * k + 1) * d2 * delta**2
    raise ValueError(strategy)


def predicted_bias_leading(strategy: str, phi: TestFunction, s_t: float, delta: float, j: int) -> float:
    """Only the lowest-order nonvanishing term of the bias expansion."""
    d1, d2 = phi.df(s_t), phi.d2f(s_t)
    if strategy == "chain":
        return -0.5 * j * (j + 1) * d2 * delta**2
    if strategy == "reuse":
        return j * d1 * delta
    if strategy == "zeus":
        if j % 2 == 1:
            k = (j - 1) // 2
            return 2 * k * d1 * delta if k > 0 else -(2 * k * k + 2 * k + 1) * d2 * delta**2
        return j * d1 * delta
    raise ValueError(strategy)


def predicted_variance(strategy: str, j: int, sigma: float) -> float:
    """chain: ((j+1)^2 + j^2) s^2;  zeus: s^2 even / 5 s^2 odd;  reuse: s^2."""
    w0, w1 = _STRATEGY_WEIGHTS[strategy](j)
    return (w0 * w0 + w1 * w1) * sigma * sigma


@dataclass
class StrategyErrorReport:
    strategy: str
    j: int
    delta: float
    sigma: float
    empirical_bias: float
    empirical_bias_se: float
    empirical_variance: float
    empirical_variance_se: float
    predicted_bias: float
    predicted_variance: float


def strategy_bias_variance(
    strategy: str,
    phi: TestFunction,
    s_t: float,
    delta: float,
    j: int,
    sigma: float,
    n_trials: int,
    rng: np.random.Generator | None = None,
) -> StrategyErrorReport:
    """Monte-Carlo bias/variance of one strategy on noisy observations.

    Observations are psi_u = phi(s_u) + eta_u with eta ~ N(0, sigma^2).
    With sigma == 0 the estimator is deterministic and the bias is computed
    exactly (no trials).
    """
    w0, w1 = _STRATEGY_WEIGHTS[strategy](j)
    truth = phi.f(s_t - j * delta)
    det = w0 * phi.f(s_t) + w1 * phi.f(s_t + delta)
    if sigma == 0.0:
        return StrategyErrorReport(
            strategy, j, delta, sigma,
            empirical_bias=det - truth, empirical_bias_se=0.0,
            empirical_variance=0.0, empirical_variance_se=0.0,
            predicted_bias=predicted_bias(strategy, phi, s_t, delta, j),
            predicted_variance=0.0,
        )
    if rng is None:
        raise ValueError("noisy runs need an explicit rng")
    eta = rng.normal(0.0, sigma, size=(n_trials, 2))
    est = det + w0 * eta[:, 0] + w1 * eta[:, 1]
    var = float(np.var(est, ddof=1))
    return StrategyErrorReport(
        strategy, j, delta, sigma,
        empirical_bias=float(np.mean(est) - truth),
        empirical_bias_se=float(np.std(est, ddof=1) / math.sqrt(n_trials)),
        empirical_variance=var,
        empirical_variance_se=var * math.sqrt(2.0 / (n_trials - 1)),
        predicted_bias=predicted_bias(strategy, phi, s_t, delta, j),
        predicted_variance=predicted_variance(strategy, j, sigma),
    )


def mse_scaling_slopes(
    strategy: str,
    phi: TestFunction = SIN,
    s_t: float = 0.5,
    j: int = 3,
    deltas=(2e-3, 1e-3, 5e-4),
    sigmas=(0.05, 0.1, 0.2),
    n_trials: int = 200_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """(slope in h at sigma=0, slope in sigma at tiny h) of the measured MSE.

    chain has squared bias Theta(h^4) and variance Theta(j^2 sigma^2);
    zeus/reuse have squared bias Theta(h^2) and variance Theta(sigma^2), so
    the log-log slopes are (4, 2) and (2, 2) respectively.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    hs, mses = [], []
    for d in deltas:
        rep = strategy_bias_variance(strategy, phi, s_t, d, j, 0.0, 0)
        hs.append(j * d)
        mses.append(rep.empirical_bias**2)
    slope_h = float(np.polyfit(np.log(hs), np.log(mses), 1)[0])
    mses_s = []
    for sig in sigmas:
        rep = strategy_bias_variance(strategy, phi, s_t, deltas[-1], j, sig, n_trials, rng)
        mses_s.append(rep.empirical_bias**2 + rep.empirical_variance)
    slope_s = float(np.polyfit(np.log(sigmas), np.log(mses_s), 1)[0])
    return slope_h, slope_s


# ---------------------------------------------------------------------------
# Minimax witness and achievability
# ---------------------------------------------------------------------------


def minimax_witness(M2: float, delta: float, s_t: float = 0.5):
    """Two C^2 functions indistinguishable at {s_t, s_t + D}.

    Built from p(u) = u(u-1)/2 (p(0)=p(1)=0, p(-1)=1, p'' = 1):
    g(s) = M2 D^2 p((s - s_t)/D), witnesses are +-g, separated by exactly
    2 M2 D^2 at s_t - D while both vanish at the two observation nodes.
    """
    if M2 <= 0 or delta <= 0:
        raise ValueError("M2 and delta must be positive")

    def p(u: float) -> float:
        return 0.5 * u * (u - 1.0)

    def phi_plus(s: float) -> float:
        return M2 * delta * delta * p((s - s_t) / delta)

    def phi_minus(s: float) -> float:
        return -phi_plus(s)

    separation = 2.0 * M2 * delta * delta
    return phi_plus, phi_minus, separation


@dataclass
class AchievabilityRow:
    name: str
    delta: float
    extrap_error: float
    extrap_bound: float
    reuse_error: float
    reuse_bound: float
    second_diff_ratio: float  # (D2 phi / D^2) / phi''


def achievability_check(
    functions: list[tuple[TestFunction, float, float]],
    deltas,
    s_t: float = 0.5,
) -> list[AchievabilityRow]:
    """Check |phi(s-D) - (2 phi(s) - phi(s+D))| <= M2 D^2 and reuse <= M1 D.

    ``functions`` holds (phi, M1, M2) with the derivative sup-norms on the
    interval of interest; also reports the second-difference/curvature ratio.
    """
    rows = []
    for phi, M1, M2 in functions:
        for d in deltas:
            extrap = abs(phi.f(s_t - d) - (2.0 * phi.f(s_t) - phi.f(s_t + d)))
            reuse = abs(phi.f(s_t - d) - phi.f(s_t))
            dd = (phi.f(s_t + d) - 2.0 * phi.f(s_t) + phi.f(s_t - d)) / (d * d)
            curv = phi.d2f(s_t)
            ratio = dd / curv if curv != 0 else float("nan")
            rows.append(
                AchievabilityRow(phi.name, d, extrap, M2 * d * d, reuse, M1 * d, ratio)
            )
    return rows


# ---------------------------------------------------------------------------
# Lebesgue constants
# ---------------------------------------------------------------------------


def lebesgue_constant(k: int, node_kind: str = "equispaced", n_grid: int = 10_000) -> float:
    """max over the node span of sum_j |ell_j(x)|, on an n_grid-point grid.

    equispaced nodes are {0..k}; chebyshev uses the k+1 Chebyshev-Lobatto
    points mapped onto [0, k].
    """
    if not 2 <= k <= 20:
        raise ValueError(f"k={k} outside [2, 20]")
    if node_kind == "equispaced":
        nodes = np.arange(k + 1, dtype=np.float64)
    elif node_kind == "chebyshev":
        i = np.arange(k + 1)
        nodes = (1.0 - np.cos(np.pi * i / k)) * k / 2.0
    else:
        raise ValueError(f"unknown node kind {node_kind!r}")
    xs = np.linspace(nodes[0], nodes[-1], n_grid)
    total = np.zeros_like(xs)
    for j in range(k + 1):
        lj = np.ones_like(xs)
        for m in range(k + 1):
            if m != j:
                lj *= (xs - nodes[m]) / (nodes[j] - nodes[m])
        total += np.abs(lj)
    return float(total.max())


# ---------------------------------------------------------------------------
# Solver convergence order
# ---------------------------------------------------------------------------


def solver_order_probe(
    solver_kind: str,
    sched: Schedule,
    gmm: GaussianMixture,
    x_1: np.ndarray,
    Ts=(25, 50, 100, 200),
    stop_s: float = 0.2,
    fine_T: int = 4000,
    p: Parameterization = Parameterization("epsilon"),
) -> tuple[list[float], float]:
    """Fit the convergence order of a solver against the RK4 reference.

    Integrates from s = 1 down to the common grid node ``stop_s`` (which
    must be a node of every T in Ts) and fits -slope of log error vs log T.
    The error is measured away from the data end, where the sigma floor
    makes the log-SNR step non-vanishing and would pollute the asymptotics.
    """
    from zeus_ode.schedule import make_grid
    from zeus_ode.solver import STEP_FNS, SolverState, reference_solve

    den = oracle_denoiser(gmm, sched, p)
    ref = reference_solve(den, sched, x_1, fine_T, stop_s=stop_s)
    step_fn = STEP_FNS[solver_kind]
    errors = []
    for T in Ts:
        stop_t = round(stop_s * T)
        if abs(stop_t / T - stop_s) > 1e-12:
            raise ValueError(f"stop_s={stop_s} is not a grid node for T={T}")
        grid = make_grid(T)
        state = SolverState(x=np.asarray(x_1, dtype=np.float64).copy(), t=T)
        for t in range(T, stop_t, -1):
            psi = den.evaluate(state.x, grid.s(t), t)
            state = step_fn(state, psi, p, sched, grid)
        errors.append(float(np.max(np.abs(state.x - ref))))
    order = -float(np.polyfit(np.log(Ts), np.log(errors), 1)[0])
    return errors, order


# ---------------------------------------------------------------------------
# Population trend of each prediction target
# ---------------------------------------------------------------------------


@dataclass
class TrendRow:
    s: float
    empirical_mean: np.ndarray
    predicted_mean: np.ndarray
    standard_error: np.ndarray

    @property
    def max_sigmas_off(self) -> float:
        return float(np.max(np.abs(self.empirical_mean - self.predicted_mean) / self.standard_error))


def predicted_trend(p: Parameterization, gmm: GaussianMixture, sched: Schedule, s: float) -> np.ndarray:
    """E[psi | s]: 0 for epsilon/score, E[x0] for x0, -sigma E[x0] for v,
    d_alpha * E[x0] for flow."""
    _, sigma, d_alpha, _ = sched.alpha_sigma(s)
    mean_x0 = gmm.mean
    if p.tag in ("epsilon", "score"):
        return np.zeros_like(mean_x0)
    if p.tag == "x0":
        return mean_x0
    if p.tag == "v":
        return -sigma * mean_x0
    return d_alpha * mean_x0  # flow


def trend_check(
    p: Parameterization,
    gmm: GaussianMixture,
    sched: Schedule,
    s_grid,
    n_samples: int,
    rng: np.random.Generator,
) -> list[TrendRow]:
    """Monte-Carlo mean of oracle outputs over x_s ~ q_s vs the closed form."""
    den = oracle_denoiser(gmm, sched, p)
    rows = []
    for s in s_grid:
        alpha, sigma, _, _ = sched.alpha_sigma(s)
        x0 = gmm.sample(n_samples, rng)
        eps = rng.standard_normal(x0.shape)
        x_s = alpha * x0 + sigma * eps
        psi = den.evaluate(x_s, s, t=0)
        mean = psi.mean(axis=0)
        se = psi.std(axis=0, ddof=1) / math.sqrt(n_samples)
        rows.append(TrendRow(s, mean, predicted_trend(p, gmm, sched, s), se))
    return rows
