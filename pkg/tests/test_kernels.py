"""Backend parity: the compiled kernels must match the NumPy reference."""

import numpy as np
import pytest

from zeus_ode._kernels import BACKEND
from zeus_ode._kernels import _gmm_np as ref

try:
    from zeus_ode._kernels import _gmm_cy as cy
except ImportError:
    cy = None

needs_cython = pytest.mark.skipif(cy is None, reason="compiled kernel not built")


def _instance(rng, n=64, K=3, d=2):
    x = rng.standard_normal((n, d))
    w = rng.uniform(0.2, 1.0, K)
    w /= w.sum()
    means = rng.standard_normal((K, d)) * 2
    variances = rng.uniform(0.05, 0.5, K)
    return x, w, means, variances


@needs_cython
@pytest.mark.parametrize("alpha,sigma", [(0.9, 0.435), (0.3, 0.954), (0.999, 1e-4)])
def test_posterior_mean_parity(rng, alpha, sigma):
    x, w, means, variances = _instance(rng)
    a = cy.gmm_posterior_mean(x, w, means, variances, alpha, sigma)
    b = ref.gmm_posterior_mean(x, w, means, variances, alpha, sigma)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@needs_cython
@pytest.mark.parametrize("alpha,sigma", [(0.9, 0.435), (0.3, 0.954)])
def test_score_parity(rng, alpha, sigma):
    x, w, means, variances = _instance(rng)
    a = cy.gmm_score(x, w, means, variances, alpha, sigma)
    b = ref.gmm_score(x, w, means, variances, alpha, sigma)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_cython
def test_log_density_parity(rng):
    x, w, means, variances = _instance(rng, n=128)
    a = cy.gmm_log_density(x, w, means, variances, 0.7, 0.714)
    b = ref.gmm_log_density(x, w, means, variances, 0.7, 0.714)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_cython
def test_far_tail_parity(rng):
    # Log-space responsibilities must agree far in the tails too.
    w = np.array([0.5, 0.5])
    means = np.array([[1.0], [-1.0]])
    variances = np.array([0.01, 0.01])
    x = np.array([[300.0], [-300.0]])
    a = cy.gmm_posterior_mean(x, w, means, variances, 0.98, 0.2)
    b = ref.gmm_posterior_mean(x, w, means, variances, 0.98, 0.2)
    assert np.isfinite(a).all()
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_selected_backend_reported():
    assert BACKEND in ("cython", "numpy")
