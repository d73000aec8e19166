"""Noise schedules (alpha_s, sigma_s) on s in [0, 1] with analytic derivatives.

Conventions: s = 1 is pure noise, s = 0 is data, and the forward marginal is
x_s = alpha_s * x_0 + sigma_s * eps.  Three schedule kinds are supported:

- ``vp_linear``: variance preserving with drift f(s) = -beta(s)/2 and
  beta(s) = beta_min + (beta_max - beta_min) * s, so that
  log alpha_s = -beta_min * s / 2 - (beta_max - beta_min) * s**2 / 4.
- ``vp_cosine``: the squashed-cosine log-alpha with offset ``cosine_s`` and
  end time ``s_max`` (the raw cosine hits alpha = 0 at s = 1, so the domain
  is compressed to keep alpha positive).
- ``rectified_flow``: the linear path alpha_s = 1 - s, sigma_s = s, exactly.

VP kinds satisfy alpha^2 + sigma^2 = 1; sigma is floored at ``SIGMA_FLOOR``
near s = 0 so the log-SNR stays finite at the data end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from zeus_ode.errors import InvalidGridError, LogSnrUndefinedError

SIGMA_FLOOR = 1e-4

_VP_LINEAR_DEFAULTS = {"beta_min": 0.1, "beta_max": 20.0}
_VP_COSINE_DEFAULTS = {"cosine_s": 0.008, "s_max": 0.9946}

KINDS = ("vp_linear", "vp_cosine", "rectified_flow")


class ScheduleValues(NamedTuple):
    alpha: float
    sigma: float
    d_alpha: float
    d_sigma: float
    log_snr: float


@dataclass(frozen=True)
class Schedule:
    """A noise schedule; immutable and safe to share across trajectories."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        defaults = dict(
            _VP_LINEAR_DEFAULTS if self.kind == "vp_linear"
            else _VP_COSINE_DEFAULTS if self.kind == "vp_cosine"
            else {}
        )
        defaults.update(self.params)
        object.__setattr__(self, "params", defaults)

    # -- alpha / sigma and their s-derivatives ------------------------------

    def alpha_sigma(self, s: float) -> tuple[float, float, float, float]:
        """Return (alpha, sigma, d_alpha/ds, d_sigma/ds) at s in [0, 1]."""
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s={s} outside [0, 1]")
        if self.kind == "rectified_flow":
            return 1.0 - s, s, -1.0, 1.0
        if self.kind == "vp_linear":
            bmin, bmax = self.params["beta_min"], self.params["beta_max"]
            log_a = -0.25 * (bmax - bmin) * s * s - 0.5 * bmin * s
            alpha = math.exp(log_a)
            d_alpha = alpha * (-0.5) * (bmin + (bmax - bmin) * s)
        else:  # vp_cosine
            c, s_max = self.params["cosine_s"], self.params["s_max"]
            scale = math.pi / 2.0 / (1.0 + c)
            theta0 = scale * c
            theta = scale * (s * s_max + c)
            alpha = math.cos(theta) / math.cos(theta0)
            d_alpha = -math.sin(theta) * scale * s_max / math.cos(theta0)
        sig2 = max(1.0 - alpha * alpha, 0.0)
        sigma = math.sqrt(sig2)
        if sigma <= SIGMA_FLOOR:
            # Inside the floor region sigma is held constant.
            return alpha, SIGMA_FLOOR, d_alpha, 0.0
        d_sigma = -alpha * d_alpha / sigma
        return alpha, sigma, d_alpha, d_sigma

    def log_snr(self, s: float) -> float:
        """lambda = log(alpha_s / sigma_s); -inf at alpha == 0."""
        alpha, sigma, _, _ = self.alpha_sigma(s)
        if sigma == 0.0:
            raise LogSnrUndefinedError(f"sigma == 0 at s={s}")
        if alpha == 0.0:
            return -math.inf
        return math.log(alpha / sigma)


def eval_schedule(sched: Schedule, s: float) -> ScheduleValues:
    """Evaluate (alpha, sigma, d_alpha, d_sigma, log_snr) at s.

    Raises LogSnrUndefinedError when sigma == 0 (rectified flow at s = 0);
    callers that do not need the log-SNR should use Schedule.alpha_sigma.
    """
    alpha, sigma, d_alpha, d_sigma = sched.alpha_sigma(s)
    return ScheduleValues(alpha, sigma, d_alpha, d_sigma, sched.log_snr(s))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid s_t = t/T, traversed from t = T (noise) down to 0 (data)."""

    T: int
    nodes: np.ndarray  # descending: nodes[i] = (T - i) / T

    @property
    def delta(self) -> float:
        return 1.0 / self.T

    def s(self, t: int) -> float:
        """Grid node for step index t in [0, T]."""
        if not 0 <= t <= self.T:
            raise InvalidGridError(f"step index {t} outside [0, {self.T}]")
        return t / self.T


def make_grid(T: int) -> TimeGrid:
    if T < 2:
        raise InvalidGridError(f"T={T}; need T >= 2")
    nodes = np.arange(T, -1, -1, dtype=np.float64) / T
    return TimeGrid(T=T, nodes=nodes)
