"""Training-free acceleration of probability-flow ODE sampling.

The solver integrates the standard grid; a deterministic 1:r step plan
replaces most denoiser calls with predictions built from the observed
information pair {psi_t, psi_t - psi_hat_{t+1}}, and the analysis suite
verifies the estimator theory (BLUE weights, bias/variance tables,
extrapolation-weight growth, Lebesgue constants) numerically.
"""

from zeus_ode._kernels import BACKEND as kernel_backend
from zeus_ode.metrics import Trajectory, mse, per_step_mse, psnr, speedup_proxy
from zeus_ode.oracle import (
    DenoiserHandle,
    GaussianMixture,
    noisy_denoiser,
    oracle_denoiser,
    posterior_mean,
    score,
)
from zeus_ode.parameterization import (
    Parameterization,
    convert_target,
    reconstruct_x0,
    reconstruction_coeffs,
)
from zeus_ode.schedule import Schedule, TimeGrid, eval_schedule, make_grid
from zeus_ode.skipper import (
    ObservedInfoSet,
    PredictorStrategy,
    StepPlan,
    full_plan,
    make_step_plan,
    observe,
    predict,
    run_accelerated,
)
from zeus_ode.solver import SolverState, dpmpp2m_step, euler_step, reference_solve
from zeus_ode.tracefile import read_trace, write_trace

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "Trajectory", "mse", "per_step_mse", "psnr", "speedup_proxy",
    "DenoiserHandle", "GaussianMixture", "noisy_denoiser", "oracle_denoiser",
    "posterior_mean", "score",
    "Parameterization", "convert_target", "reconstruct_x0", "reconstruction_coeffs",
    "Schedule", "TimeGrid", "eval_schedule", "make_grid",
    "ObservedInfoSet", "PredictorStrategy", "StepPlan", "full_plan",
    "make_step_plan", "observe", "predict", "run_accelerated",
    "SolverState", "dpmpp2m_step", "euler_step", "reference_solve",
    "read_trace", "write_trace",
    "__version__",
]
