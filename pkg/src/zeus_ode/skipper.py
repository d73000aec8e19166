"""Interleaved 1:r step skipping and the predictors that fill reduced steps.

A step plan labels each solver step Full (fresh denoiser call) or
Reduced(j), where j is the offset from the most recent Full step.  At a Full
step the predictor state is the observed information pair {psi_t, delta}
with delta = psi_t - psi_hat_{t+1}, the backward difference against the
previously committed value.  Reduced steps are filled by one of:

- ``zeus``: 2*psi - psi_hat_prev at odd offsets, psi at even offsets
  (one extrapolation, then cycling; never chained);
- ``reuse``: psi at every offset;
- ``chain``: psi + j * delta, i.e. (j+1)*psi - j*psi_hat_prev;
- ``lagrange:k``: degree-k extrapolation over the k+1 most recent fresh
  evaluations, with weights from :mod:`zeus_ode.analysis` at offset j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from zeus_ode.errors import HistoryUnderflowError, InvalidPlanError, ShapeError
from zeus_ode.metrics import Trajectory
from zeus_ode.oracle import DenoiserHandle
from zeus_ode.parameterization import Parameterization
from zeus_ode.schedule import Schedule, TimeGrid
from zeus_ode.solver import STEP_FNS, SolverState

FULL = 0  # label value; Reduced(j) is stored as j >= 1

STRATEGY_TAGS = ("zeus_interleave", "reuse_only", "predictor_only", "lagrange")


@dataclass(frozen=True)
class StepPlan:
    """Labels over steps t = T..1 (index 0 is the first executed step)."""

    labels: np.ndarray
    r: int
    warm_frac: float
    cool_frac: float

    @property
    def T(self) -> int:
        return len(self.labels)

    @property
    def n_full(self) -> int:
        return int(np.count_nonzero(self.labels == FULL))

    def skip_region(self) -> tuple[int, int]:
        """(start, stop) indices of the tiled middle region."""
        T = self.T
        warm = _round_half_up(self.warm_frac * T)
        cool = _round_half_up(self.cool_frac * T)
        return warm, T - cool


@dataclass(frozen=True)
class ObservedInfoSet:
    """The predictor state: exactly two vectors, independent of T, r, d."""

    psi: np.ndarray
    delta: np.ndarray
    anchor_t: int

    @property
    def retained_vector_count(self) -> int:
        return 2


@dataclass(frozen=True)
class PredictorStrategy:
    tag: str
    k: int = 0  # lagrange order

    def __post_init__(self):
        if self.tag not in STRATEGY_TAGS:
            raise ValueError(f"unknown strategy {self.tag!r}")
        if self.tag == "lagrange" and not 1 <= self.k <= 6:
            raise ValueError(f"lagrange order {self.k} outside [1, 6]")

    @staticmethod
    def parse(spec: str) -> "PredictorStrategy":
        """Parse a config string: zeus | reuse | chain | lagrange:k."""
        if spec == "zeus":
            return PredictorStrategy("zeus_interleave")
        if spec == "reuse":
            return PredictorStrategy("reuse_only")
        if spec == "chain":
            return PredictorStrategy("predictor_only")
        if spec.startswith("lagrange:"):
            return PredictorStrategy("lagrange", k=int(spec.split(":", 1)[1]))
        raise ValueError(f"unknown strategy string {spec!r}")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def make_step_plan(T: int, r: int, warm_frac: float, cool_frac: float) -> StepPlan:
    if r < 1:
        raise InvalidPlanError(f"r={r}; need r >= 1")
    if T < r + 2:
        raise InvalidPlanError(f"T={T} too short for r={r}")
    if warm_frac < 0 or cool_frac < 0 or warm_frac + cool_frac >= 1:
        raise InvalidPlanError(f"bad fractions warm={warm_frac} cool={cool_frac}")
    warm = _round_half_up(warm_frac * T)
    cool = _round_half_up(cool_frac * T)
    mid = T - warm - cool
    labels = [FULL] * warm
    i = 0
    while i < mid:
        labels.append(FULL)
        i += 1
        j = 1
        while j <= r and i < mid:
            labels.append(j)
            i += 1
            j += 1
    labels.extend([FULL] * cool)
    return StepPlan(
        labels=np.asarray(labels, dtype=np.int64),
        r=r,
        warm_frac=warm_frac,
        cool_frac=cool_frac,
    )


def full_plan(T: int) -> StepPlan:
    """The unaccelerated baseline: every step Full."""
    return StepPlan(labels=np.zeros(T, dtype=np.int64), r=0, warm_frac=0.0, cool_frac=0.0)


def observe(psi_t: np.ndarray, psi_hat_prev: np.ndarray | None, t: int) -> ObservedInfoSet:
    """Form the information pair at a Full step.

    psi_hat_prev is the value committed at step t+1 (fresh or predicted);
    None at the trajectory's first Full step, where delta = 0.
    """
    psi_t = np.asarray(psi_t)
    if psi_hat_prev is None:
        return ObservedInfoSet(psi=psi_t, delta=np.zeros_like(psi_t), anchor_t=t)
    psi_hat_prev = np.asarray(psi_hat_prev)
    if psi_t.shape != psi_hat_prev.shape:
        raise ShapeError(f"{psi_t.shape} vs {psi_hat_prev.shape}")
    return ObservedInfoSet(psi=psi_t, delta=psi_t - psi_hat_prev, anchor_t=t)


def predict(
    strategy: PredictorStrategy,
    info: ObservedInfoSet,
    j: int,
    history: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Approximate psi at offset j >= 1 past the anchor Full step."""
    if j < 1:
        raise ValueError(f"offset j={j}; need j >= 1")
    if strategy.tag == "zeus_interleave":
        return info.psi + info.delta if j % 2 == 1 else info.psi.copy()
    if strategy.tag == "reuse_only":
        return info.psi.copy()
    if strategy.tag == "predictor_only":
        return info.psi + j * info.delta
    # lagrange: history holds fresh evaluations, newest first
    from zeus_ode.analysis import lagrange_weights

    k = strategy.k
    if history is None or len(history) < k + 1:
        have = 0 if history is None else len(history)
        raise HistoryUnderflowError(f"lagrange({k}) needs {k + 1} entries, have {have}")
    w = lagrange_weights(k, j).weights
    out = w[0] * history[0]
    for m in range(1, k + 1):
        out = out + w[m] * history[m]
    return out


class Predictor:
    """Stateful wrapper holding the observed pair (and lagrange history).

    For the zeus/reuse/chain strategies the retained state is exactly one
    ObservedInfoSet, i.e. two d-vectors, whatever T and r are.
    """

    def __init__(self, strategy: PredictorStrategy):
        self.strategy = strategy
        self.info: ObservedInfoSet | None = None
        self._history: list[np.ndarray] = []

    def observe(self, psi_t: np.ndarray, psi_hat_prev: np.ndarray | None, t: int) -> None:
        self.info = observe(psi_t, psi_hat_prev, t)
        if self.strategy.tag == "lagrange":
            self._history.insert(0, np.asarray(psi_t))
            del self._history[self.strategy.k + 1 :]

    def predict(self, j: int) -> np.ndarray:
        if self.info is None:
            raise HistoryUnderflowError("predict before any full evaluation")
        if self.strategy.tag != "lagrange":
            return predict(self.strategy, self.info, j)
        # Degrade to the available order while the history fills up.
        k_eff = min(self.strategy.k, len(self._history) - 1)
        if k_eff == 0:
            return self._history[0].copy()
        eff = self.strategy if k_eff == self.strategy.k else PredictorStrategy("lagrange", k=k_eff)
        return predict(eff, self.info, j, history=self._history)

    @property
    def retained_vector_count(self) -> int:
        """Number of d-vectors held; 2 for the interleave-family strategies."""
        n = 0 if self.info is None else self.info.retained_vector_count
        return n + len(self._history)


def run_accelerated(
    den: DenoiserHandle,
    plan: StepPlan,
    strategy: PredictorStrategy,
    solver: str,
    p: Parameterization,
    sched: Schedule,
    grid: TimeGrid,
    x_1: np.ndarray,
    rng: np.random.Generator | None = None,
    inspect=None,
) -> Trajectory:
    """Integrate t = T..1, predicting psi at Reduced steps.

    Every step feeds its psi (fresh or predicted) to the solver exactly as
    if it were fresh; ``inspect(predictor, t)``, when given, is called after
    each step (used to assert the O(1)-state property).
    """
    if plan.T != grid.T:
        raise InvalidPlanError(f"plan length {plan.T} != grid T {grid.T}")
    step_fn = STEP_FNS[solver]
    state = SolverState(x=np.asarray(x_1, dtype=np.float64).copy(), t=grid.T)
    predictor = Predictor(strategy)
    committed_prev: np.ndarray | None = None

    states, psis, fresh = [], [], []
    for i, t in enumerate(range(grid.T, 0, -1)):
        label = int(plan.labels[i])
        if label == FULL:
            psi = den.evaluate(state.x, grid.s(t), t, rng=rng)
            predictor.observe(psi, committed_prev, t)
            is_fresh = True
        else:
            psi = predictor.predict(label)
            is_fresh = False
        committed_prev = psi
        state = step_fn(state, psi, p, sched, grid)
        states.append(state.x)
        psis.append(psi)
        fresh.append(is_fresh)
        if inspect is not None:
            inspect(predictor, t)

    return Trajectory(
        states=np.asarray(states),
        psis=np.asarray(psis),
        fresh=np.asarray(fresh, dtype=bool),
        nfe=int(np.count_nonzero(fresh)),
    )
