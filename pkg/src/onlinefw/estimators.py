"""Gradient estimators shared by the online learners.

Three kinds. The recursive estimator applies the same-sample
correction

    d_t = g_new + (1 - rho_t) * (d_{t-1} - g_old_same_xi),

where ``g_new`` and ``g_old_same_xi`` are the round's stochastic
gradient evaluated at the current and previous iterate under the SAME
realization. The momentum average drops the correction term,
d_t = (1 - rho_t) d_{t-1} + rho_t g_new, and the plain estimator just
takes the fresh gradient. States are values: updates return new
states, callers keep prev_x current via ``dataclasses.replace``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ScheduleSpec",
    "rho",
    "EstimatorKind",
    "EstimatorState",
    "estimator_init",
    "estimator_update",
    "estimator_error",
]


@dataclass(frozen=True)
class ScheduleSpec:
    """The step/mixing schedule family rho_t = eta_t = 1/(t+1)^alpha."""

    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


def rho(schedule: ScheduleSpec, t: int) -> float:
    if t < 1:
        raise ValueError(f"schedule index must be >= 1, got {t}")
    return 1.0 / (t + 1.0) ** schedule.alpha


class EstimatorKind(enum.Enum):
    RECURSIVE = "recursive"
    MOMENTUM_AVERAGE = "momentum_average"
    PLAIN = "plain"


@dataclass(frozen=True)
class EstimatorState:
    kind: EstimatorKind
    d: np.ndarray
    prev_x: np.ndarray
    t: int

    def __post_init__(self):
        if self.d.shape != self.prev_x.shape:
            raise ValueError(
                f"estimate shape {self.d.shape} != prev_x shape {self.prev_x.shape}"
            )
        if self.t < 1:
            raise ValueError(f"round counter must be >= 1, got {self.t}")


def estimator_init(kind: EstimatorKind, g1: np.ndarray, x1=None) -> EstimatorState:
    """First-round state: d_1 is the raw gradient, no correction yet."""
    g1 = np.asarray(g1, dtype=np.float64)
    prev = np.zeros_like(g1) if x1 is None else np.asarray(x1, dtype=np.float64)
    return EstimatorState(kind=kind, d=g1, prev_x=prev, t=1)


def estimator_update(st: EstimatorState, g_new: np.ndarray,
                     g_old_same_xi: np.ndarray, rho_t: float) -> EstimatorState:
    if not (0.0 < rho_t <= 1.0):
        raise ValueError(f"rho_t must be in (0, 1], got {rho_t}")
    if g_new.shape != st.d.shape or g_old_same_xi.shape != st.d.shape:
        raise ValueError("gradient shape does not match estimator state")
    if st.kind is EstimatorKind.RECURSIVE:
        d = g_new + (1.0 - rho_t) * (st.d - g_old_same_xi)
    elif st.kind is EstimatorKind.MOMENTUM_AVERAGE:
        d = (1.0 - rho_t) * st.d + rho_t * g_new
    else:
        d = g_new
    return replace(st, d=d, t=st.t + 1)


def estimator_error(st: EstimatorState, true_grad: np.ndarray) -> float:
    """Euclidean norm of d_t minus the supplied true gradient."""
    return float(np.linalg.norm(st.d - true_grad))
