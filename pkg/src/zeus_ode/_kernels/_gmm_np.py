"""NumPy reference implementation of the Gaussian-mixture denoiser kernels.

All inputs are float64; x has shape (n, d), means (K, d), weights and
variances (K,).  The marginal of x_s for an isotropic mixture component i is
N(alpha * mu_i, (alpha^2 * var_i + sigma^2) I), and responsibilities are
formed in log space to survive far-tail queries.
"""

import numpy as np

BACKEND = "numpy"


def _log_responsibilities(x, weights, means, variances, alpha, sigma):
    d = x.shape[1]
    v = alpha * alpha * variances + sigma * sigma  # (K,)
    diff = x[:, None, :] - alpha * means[None, :, :]  # (n, K, d)
    sq = np.einsum("nkd,nkd->nk", diff, diff)
    log_r = np.log(weights)[None, :] - 0.5 * d * np.log(2.0 * np.pi * v)[None, :] - sq / (2.0 * v)[None, :]
    log_r = log_r - log_r.max(axis=1, keepdims=True)
    return log_r, diff, v


def gmm_posterior_mean(x, weights, means, variances, alpha, sigma):
    """E[x0 | x_s = x] for each row of x; shape (n, d)."""
    log_r, diff, v = _log_responsibilities(x, weights, means, variances, alpha, sigma)
    r = np.exp(log_r)
    r /= r.sum(axis=1, keepdims=True)
    comp_mean = means[None, :, :] + (alpha * variances / v)[None, :, None] * diff
    return np.einsum("nk,nkd->nd", r, comp_mean)


def gmm_score(x, weights, means, variances, alpha, sigma):
    """Marginal score grad_x log q_s(x) for each row of x; shape (n, d)."""
    log_r, diff, v = _log_responsibilities(x, weights, means, variances, alpha, sigma)
    r = np.exp(log_r)
    r /= r.sum(axis=1, keepdims=True)
    comp_score = -diff / v[None, :, None]
    return np.einsum("nk,nkd->nd", r, comp_score)


def gmm_log_density(x, weights, means, variances, alpha, sigma):
    """log q_s(x) of the mixture marginal; shape (n,)."""
    d = x.shape[1]
    v = alpha * alpha * variances + sigma * sigma
    diff = x[:, None, :] - alpha * means[None, :, :]
    sq = np.einsum("nkd,nkd->nk", diff, diff)
    log_terms = np.log(weights)[None, :] - 0.5 * d * np.log(2.0 * np.pi * v)[None, :] - sq / (2.0 * v)[None, :]
    m = log_terms.max(axis=1, keepdims=True)
    return (m + np.log(np.exp(log_terms - m).sum(axis=1, keepdims=True))).ravel()
