"""Trajectory records and comparison metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from zeus_ode.errors import ShapeError


@dataclass
class Trajectory:
    """Per-step record of an integration run, in sampling order (t = T..1).

    states[i] is the state after executing step t = T - i; psis[i] is the
    denoiser value (fresh or predicted) consumed at that step; fresh[i]
    marks fresh evaluations.  nfe == count(fresh).
    """

    states: np.ndarray  # (T, d)
    psis: np.ndarray    # (T, d)
    fresh: np.ndarray   # (T,) bool
    nfe: int

    def __post_init__(self):
        if not (len(self.states) == len(self.psis) == len(self.fresh)):
            raise ShapeError("states, psis, fresh must have equal length")
        if self.nfe != int(np.count_nonzero(self.fresh)):
            raise ValueError("nfe does not match the fresh mask")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def mse(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"{a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def per_step_mse(a: Trajectory, b: Trajectory) -> np.ndarray:
    if a.states.shape != b.states.shape:
        raise ShapeError(f"{a.states.shape} vs {b.states.shape}")
    return np.mean((a.states - b.states) ** 2, axis=1)


def psnr(a: np.ndarray, b: np.ndarray, peak: float) -> float:
    if peak <= 0:
        raise ValueError(f"peak={peak} must be positive")
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def speedup_proxy(accelerated: Trajectory, baseline: Trajectory) -> float:
    if baseline.nfe <= 0 or accelerated.nfe <= 0:
        raise ValueError("both runs need nfe > 0")
    return baseline.nfe / accelerated.nfe
