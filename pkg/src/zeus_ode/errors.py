"""Exception types shared across the package."""


class ZeusOdeError(Exception):
    """Base class for all package errors."""


class ShapeError(ZeusOdeError, ValueError):
    """Operands have mismatched dimensions."""


class InvalidGridError(ZeusOdeError, ValueError):
    """Time grid parameters are out of range."""


class LogSnrUndefinedError(ZeusOdeError, ValueError):
    """log(alpha/sigma) requested at a point where sigma == 0."""


class DegenerateParameterizationError(ZeusOdeError, ValueError):
    """The (alpha, sigma) x (u, v) system is singular at the evaluated time."""


class SingularConversionError(ZeusOdeError, ValueError):
    """Target conversion needs a noise estimate but sigma == 0."""


class SingularScoreError(ZeusOdeError, ValueError):
    """Marginal score requested at sigma == 0."""


class InvalidStateError(ZeusOdeError, ValueError):
    """Non-finite state passed to the denoiser."""


class TraceFormatError(ZeusOdeError, ValueError):
    """Trace file is malformed (bad magic, version, or truncated)."""


class TraceDesyncError(ZeusOdeError, RuntimeError):
    """Recorded denoiser queried out of order, or trace/config mismatch."""


class PastEndOfTrajectoryError(ZeusOdeError, RuntimeError):
    """Solver stepped past the last grid node."""


class HistoryUnderflowError(ZeusOdeError, RuntimeError):
    """Lagrange predictor called with fewer than order+1 history entries."""


class InvalidPlanError(ZeusOdeError, ValueError):
    """Step-plan parameters are inconsistent."""


class GlsSingularError(ZeusOdeError, ValueError):
    """Covariance passed to the GLS weight solver is singular."""


class ReferenceRequiresOracleError(ZeusOdeError, ValueError):
    """Reference solve needs an analytic (exact) denoiser."""


class ConfigError(ZeusOdeError, ValueError):
    """Experiment configuration failed validation."""
