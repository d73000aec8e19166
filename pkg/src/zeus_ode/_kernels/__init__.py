"""Hot-loop kernels: compiled extension when available, NumPy otherwise.

Set ``ZEUS_ODE_PURE_PYTHON=1`` to force the NumPy backend (used by the
benchmark and the backend-parity tests).
"""

import os

if os.environ.get("ZEUS_ODE_PURE_PYTHON"):
    from zeus_ode._kernels._gmm_np import (  # noqa: F401
        BACKEND,
        gmm_log_density,
        gmm_posterior_mean,
        gmm_score,
    )
else:
    try:
        from zeus_ode._kernels._gmm_cy import (  # noqa: F401
            BACKEND,
            gmm_log_density,
            gmm_posterior_mean,
            gmm_score,
        )
    except ImportError:
        from zeus_ode._kernels._gmm_np import (  # noqa: F401
            BACKEND,
            gmm_log_density,
            gmm_posterior_mean,
            gmm_score,
        )

__all__ = ["BACKEND", "gmm_posterior_mean", "gmm_score", "gmm_log_density"]
