#!/usr/bin/env python3
"""Benchmark the compiled GMM kernels against the NumPy fallback.

Two regimes matter: the per-step solver call (single small query, latency
bound) and the Monte-Carlo batch (throughput bound).  Run:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from zeus_ode._kernels import _gmm_np as np_backend

try:
    from zeus_ode._kernels import _gmm_cy as cy_backend
except ImportError:
    cy_backend = None


def bench(fn, *args, repeat=5, min_time=0.2):
    # Calibrate the loop count, then take the best of `repeat` runs.
    fn(*args)
    n = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(n):
            fn(*args)
        dt = time.perf_counter() - t0
        if dt > min_time / 4:
            break
        n *= 4
    best = min(
        _timed(fn, args, n) for _ in range(repeat)
    )
    return best / n


def _timed(fn, args, n):
    t0 = time.perf_counter()
    for _ in range(n):
        fn(*args)
    return time.perf_counter() - t0


def main():
    rng = np.random.default_rng(0)
    K = 3
    weights = np.full(K, 1.0 / K)
    variances = rng.uniform(0.1, 0.4, K)
    cases = {
        "solver step  (n=1,     d=2)": rng.standard_normal((1, 2)),
        "MC batch     (n=100k,  d=2)": rng.standard_normal((100_000, 2)),
        "latent-ish   (n=1,     d=16384)": rng.standard_normal((1, 16384)),
    }
    print(f"{'case':32s} {'numpy':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, x in cases.items():
        means = rng.standard_normal((K, x.shape[1])) * 2
        args = (np.ascontiguousarray(x), weights, means, variances, 0.8, 0.6)
        t_np = bench(np_backend.gmm_posterior_mean, *args)
        if cy_backend is None:
            print(f"{name:32s} {t_np * 1e6:10.1f}us {'n/a':>12s}")
            continue
        t_cy = bench(cy_backend.gmm_posterior_mean, *args)
        print(f"{name:32s} {t_np * 1e6:10.1f}us {t_cy * 1e6:10.1f}us {t_np / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
