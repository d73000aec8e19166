"""Prediction-target parameterizations and their exact linear interconversion.

Every common target is an affine readout psi0 = u_s * eps + v_s * x0 of the
latent pair, so the clean sample is recovered by the algebraic identity
x0 = a_s * x_s + b_s * psi0 with a_s = u_s / D_s, b_s = -sigma_s / D_s and
D_s = alpha_s * u_s - sigma_s * v_s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from zeus_ode.errors import (
    DegenerateParameterizationError,
    ShapeError,
    SingularConversionError,
)
from zeus_ode.schedule import Schedule

TAGS = ("epsilon", "x0", "v", "score", "flow")


@dataclass(frozen=True)
class Parameterization:
    tag: str

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown parameterization {self.tag!r}")


def target_coeffs(p: Parameterization, sched: Schedule, s: float) -> tuple[float, float]:
    """(u_s, v_s) with psi0 = u_s * eps + v_s * x0.

    epsilon -> (1, 0); x0 -> (0, 1); v -> (alpha, -sigma);
    score -> (-1/sigma, 0); flow -> (d_sigma, d_alpha), which reduces to
    (1, -1) on the rectified-flow path.
    """
    alpha, sigma, d_alpha, d_sigma = sched.alpha_sigma(s)
    if p.tag == "epsilon":
        return 1.0, 0.0
    if p.tag == "x0":
        return 0.0, 1.0
    if p.tag == "v":
        return alpha, -sigma
    if p.tag == "score":
        if sigma == 0.0:
            raise SingularConversionError("score target undefined at sigma == 0")
        return -1.0 / sigma, 0.0
    return d_sigma, d_alpha  # flow


def reconstruction_coeffs(p: Parameterization, sched: Schedule, s: float) -> tuple[float, float]:
    """(a_s, b_s) such that x0 = a_s * x_s + b_s * psi0 identically."""
    if p.tag == "x0":
        return 0.0, 1.0  # constant row; the det form 0/-sigma is removable at sigma=0
    alpha, sigma, _, _ = sched.alpha_sigma(s)
    u, v = target_coeffs(p, sched, s)
    det = alpha * u - sigma * v
    if abs(det) < 1e-12:
        raise DegenerateParameterizationError(
            f"{p.tag} degenerate at s={s}: det={det}"
        )
    return u / det, -sigma / det


def reconstruct_x0(
    p: Parameterization,
    x_s: np.ndarray,
    psi: np.ndarray,
    sched: Schedule,
    s: float,
) -> np.ndarray:
    x_s = np.asarray(x_s)
    psi = np.asarray(psi)
    if x_s.shape != psi.shape:
        raise ShapeError(f"x_s {x_s.shape} vs psi {psi.shape}")
    a, b = reconstruction_coeffs(p, sched, s)
    return a * x_s + b * psi


def convert_target(
    psi: np.ndarray,
    src: Parameterization,
    dst: Parameterization,
    x_s: np.ndarray,
    sched: Schedule,
    s: float,
) -> np.ndarray:
    """Re-express a prediction in another parameterization at the same (x_s, s)."""
    x0_hat = reconstruct_x0(src, x_s, psi, sched, s)
    u, v = target_coeffs(dst, sched, s)
    if u == 0.0:
        return v * x0_hat
    alpha, sigma, _, _ = sched.alpha_sigma(s)
    if sigma == 0.0:
        raise SingularConversionError(
            f"conversion to {dst.tag} needs eps_hat but sigma == 0 at s={s}"
        )
    eps_hat = (np.asarray(x_s) - alpha * x0_hat) / sigma
    return u * eps_hat + v * x0_hat
