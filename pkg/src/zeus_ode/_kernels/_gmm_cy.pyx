# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the Gaussian-mixture denoiser kernels.

Same contract as ``_gmm_np``: float64 in, float64 out, x shaped (n, d).
The per-point loop is the hot path of every solver step and Monte-Carlo
check, so it is written as plain C loops with log-space responsibilities.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, M_PI

cnp.import_array()

BACKEND = "cython"


cdef void _responsibilities(
    double[:, ::1] x,
    double[::1] weights,
    double[:, ::1] means,
    double[::1] variances,
    double alpha,
    double sigma,
    double[::1] v,
    double[::1] log_r,
    Py_ssize_t n_idx,
) noexcept nogil:
    cdef Py_ssize_t K = weights.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, j
    cdef double sq, diff, mx, total
    for i in range(K):
        sq = 0.0
        for j in range(d):
            diff = x[n_idx, j] - alpha * means[i, j]
            sq += diff * diff
        log_r[i] = log(weights[i]) - 0.5 * d * log(2.0 * M_PI * v[i]) - sq / (2.0 * v[i])
    mx = log_r[0]
    for i in range(1, K):
        if log_r[i] > mx:
            mx = log_r[i]
    total = 0.0
    for i in range(K):
        log_r[i] = exp(log_r[i] - mx)
        total += log_r[i]
    for i in range(K):
        log_r[i] /= total


def gmm_posterior_mean(double[:, ::1] x, double[::1] weights, double[:, ::1] means,
                       double[::1] variances, double alpha, double sigma):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t K = weights.shape[0]
    out_arr = np.zeros((n, d), dtype=np.float64)
    v_arr = np.empty(K, dtype=np.float64)
    r_arr = np.empty(K, dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] v = v_arr
    cdef double[::1] r = r_arr
    cdef Py_ssize_t p, i, j
    cdef double gain
    for i in range(K):
        v[i] = alpha * alpha * variances[i] + sigma * sigma
    with nogil:
        for p in range(n):
            _responsibilities(x, weights, means, variances, alpha, sigma, v, r, p)
            for i in range(K):
                gain = alpha * variances[i] / v[i]
                for j in range(d):
                    out[p, j] += r[i] * (means[i, j] + gain * (x[p, j] - alpha * means[i, j]))
    return out_arr


def gmm_score(double[:, ::1] x, double[::1] weights, double[:, ::1] means,
              double[::1] variances, double alpha, double sigma):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t K = weights.shape[0]
    out_arr = np.zeros((n, d), dtype=np.float64)
    v_arr = np.empty(K, dtype=np.float64)
    r_arr = np.empty(K, dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] v = v_arr
    cdef double[::1] r = r_arr
    cdef Py_ssize_t p, i, j
    for i in range(K):
        v[i] = alpha * alpha * variances[i] + sigma * sigma
    with nogil:
        for p in range(n):
            _responsibilities(x, weights, means, variances, alpha, sigma, v, r, p)
            for i in range(K):
                for j in range(d):
                    out[p, j] += r[i] * (alpha * means[i, j] - x[p, j]) / v[i]
    return out_arr


def gmm_log_density(double[:, ::1] x, double[::1] weights, double[:, ::1] means,
                    double[::1] variances, double alpha, double sigma):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t K = weights.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    v_arr = np.empty(K, dtype=np.float64)
    t_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] v = v_arr
    cdef double[::1] t = t_arr
    cdef Py_ssize_t p, i, j
    cdef double sq, diff, mx, total
    for i in range(K):
        v[i] = alpha * alpha * variances[i] + sigma * sigma
    with nogil:
        for p in range(n):
            for i in range(K):
                sq = 0.0
                for j in range(d):
                    diff = x[p, j] - alpha * means[i, j]
                    sq += diff * diff
                t[i] = log(weights[i]) - 0.5 * d * log(2.0 * M_PI * v[i]) - sq / (2.0 * v[i])
            mx = t[0]
            for i in range(1, K):
                if t[i] > mx:
                    mx = t[i]
            total = 0.0
            for i in range(K):
                total += exp(t[i] - mx)
            out[p] = mx + log(total)
    return out_arr
