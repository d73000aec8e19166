"""Analytic denoisers: exact conditional expectations for Gaussian mixtures.

The oracle stands in for a trained network.  For isotropic mixture data the
posterior mean E[x0 | x_s] and the marginal score have closed forms, so any
prediction target can be assembled exactly.  A noisy wrapper adds zero-mean
Gaussian perturbations to each fresh evaluation, and a recorded handle
replays per-step outputs captured from a real pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from zeus_ode import _kernels
from zeus_ode.errors import (
    InvalidStateError,
    ShapeError,
    SingularScoreError,
    TraceDesyncError,
)
from zeus_ode.parameterization import Parameterization, target_coeffs
from zeus_ode.schedule import Schedule


@dataclass(frozen=True)
class GaussianMixture:
    """Isotropic Gaussian mixture: weights (K,), means (K, d), variances (K,)."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        v = np.asarray(self.variances, dtype=np.float64)
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()}, expected 1")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if np.any(v <= 0):
            raise ValueError("variances must be positive")
        if not (w.shape[0] == m.shape[0] == v.shape[0]):
            raise ShapeError("weights, means, variances must share the leading axis")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", np.ascontiguousarray(m))
        object.__setattr__(self, "variances", v)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def mean(self) -> np.ndarray:
        """E[x0] = sum_i w_i mu_i."""
        return self.weights @ self.means

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        comp = rng.choice(len(self.weights), size=n, p=self.weights)
        eps = rng.standard_normal((n, self.dim))
        return self.means[comp] + np.sqrt(self.variances[comp])[:, None] * eps


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise ShapeError(f"x must be 1-D or 2-D, got shape {x.shape}")


def posterior_mean(gmm: GaussianMixture, x: np.ndarray, sched: Schedule, s: float) -> np.ndarray:
    """E[x0 | x_s = x], stabilized with log-space responsibilities."""
    xb, squeeze = _as_batch(x)
    if not np.all(np.isfinite(xb)):
        raise InvalidStateError("non-finite state passed to posterior_mean")
    if xb.shape[1] != gmm.dim:
        raise ShapeError(f"x dim {xb.shape[1]} vs mixture dim {gmm.dim}")
    alpha, sigma, _, _ = sched.alpha_sigma(s)
    out = _kernels.gmm_posterior_mean(xb, gmm.weights, gmm.means, gmm.variances, alpha, sigma)
    return out[0] if squeeze else out


def score(gmm: GaussianMixture, x: np.ndarray, sched: Schedule, s: float) -> np.ndarray:
    """Exact marginal score grad_x log q_s(x)."""
    alpha, sigma, _, _ = sched.alpha_sigma(s)
    if sigma == 0.0:
        raise SingularScoreError(f"sigma == 0 at s={s}")
    xb, squeeze = _as_batch(x)
    if not np.all(np.isfinite(xb)):
        raise InvalidStateError("non-finite state passed to score")
    if xb.shape[1] != gmm.dim:
        raise ShapeError(f"x dim {xb.shape[1]} vs mixture dim {gmm.dim}")
    out = _kernels.gmm_score(xb, gmm.weights, gmm.means, gmm.variances, alpha, sigma)
    return out[0] if squeeze else out


def log_density(gmm: GaussianMixture, x: np.ndarray, sched: Schedule, s: float) -> np.ndarray:
    """log q_s(x) of the mixture marginal (used by finite-difference checks)."""
    xb, squeeze = _as_batch(x)
    alpha, sigma, _, _ = sched.alpha_sigma(s)
    out = _kernels.gmm_log_density(xb, gmm.weights, gmm.means, gmm.variances, alpha, sigma)
    return out[0] if squeeze else out


@dataclass
class TraceRecord:
    step: int
    s: float
    psi: np.ndarray  # float32, shape (d,)


@dataclass
class DenoiserHandle:
    """A denoiser with an NFE ledger.

    kind: "oracle" (exact conditional expectation), "noisy_oracle" (adds
    i.i.d. N(0, noise_std^2) to each fresh output), or "recorded" (replays a
    captured trace strictly in order).  ``call_counter`` counts fresh
    evaluations and is the NFE ledger.
    """

    kind: str
    parameterization: Parameterization
    gmm: GaussianMixture | None = None
    sched: Schedule | None = None
    noise_std: float = 0.0
    records: list[TraceRecord] = field(default_factory=list)
    call_counter: int = 0
    _cursor: int = 0

    def __post_init__(self):
        if self.kind not in ("oracle", "noisy_oracle", "recorded"):
            raise ValueError(f"unknown denoiser kind {self.kind!r}")
        if self.kind in ("oracle", "noisy_oracle") and (self.gmm is None or self.sched is None):
            raise ValueError(f"{self.kind} handle needs gmm and sched")
        if self.kind == "oracle" and self.noise_std != 0.0:
            raise ValueError("oracle kind must have noise_std == 0")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")

    @property
    def dim(self) -> int:
        if self.kind == "recorded":
            return len(self.records[0].psi)
        return self.gmm.dim

    def evaluate(
        self,
        x: np.ndarray,
        s: float,
        t: int,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """One fresh denoiser output psi_t at (x, s); increments the ledger."""
        if self.kind == "recorded":
            if self._cursor >= len(self.records):
                raise TraceDesyncError(f"trace exhausted; no record for step {t}")
            rec = self.records[self._cursor]
            if rec.step != t:
                raise TraceDesyncError(f"trace expects step {rec.step}, got {t}")
            if len(rec.psi) != np.asarray(x).shape[-1]:
                raise ShapeError(f"trace d={len(rec.psi)} vs state d={np.asarray(x).shape[-1]}")
            self._cursor += 1
            self.call_counter += 1
            return rec.psi.copy()

        m = posterior_mean(self.gmm, x, self.sched, s)
        alpha, sigma, _, _ = self.sched.alpha_sigma(s)
        if sigma == 0.0:
            eps_hat = np.zeros_like(m)  # at s=0 the state is the sample itself
        else:
            eps_hat = (np.asarray(x, dtype=np.float64) - alpha * m) / sigma
        u, v = target_coeffs(self.parameterization, self.sched, s)
        psi = u * eps_hat + v * m
        if self.kind == "noisy_oracle" and self.noise_std > 0.0:
            if rng is None:
                raise ValueError("noisy_oracle evaluation needs an explicit rng")
            psi = psi + rng.normal(0.0, self.noise_std, size=psi.shape)
        self.call_counter += 1
        return psi

    def reset(self) -> None:
        """Rewind the replay cursor and the NFE ledger."""
        self._cursor = 0
        self.call_counter = 0


def oracle_denoiser(gmm: GaussianMixture, sched: Schedule, p: Parameterization) -> DenoiserHandle:
    return DenoiserHandle(kind="oracle", parameterization=p, gmm=gmm, sched=sched)


def noisy_denoiser(
    gmm: GaussianMixture, sched: Schedule, p: Parameterization, noise_std: float
) -> DenoiserHandle:
    return DenoiserHandle(
        kind="noisy_oracle", parameterization=p, gmm=gmm, sched=sched, noise_std=noise_std
    )
