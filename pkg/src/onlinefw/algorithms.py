"""Projection-free online learners.

One-step-per-round learners share a skeleton: estimate a gradient
direction d_t, call the LMO, move along the segment toward the vertex
with eta_t = 1/(t+1)^alpha. They differ only in the estimator:

* the recursive learner draws the round's stochastic gradient at both
  x_t and x_{t-1} under the same realization and applies the
  variance-corrected update,
* the one-sample averaging baseline mixes the fresh gradient into a
  running average,
* the full-history baseline recomputes the average of ALL past exact
  gradients at the current point each round (its per-round cost grows
  with t on purpose).

The meta learners rebuild the played point every round from K inner
Frank-Wolfe steps whose directions come from K perturbed-leader
instances; feedback to learner k is the round's k-th estimated
gradient (recursively corrected, or plain for the uncorrected
variant).

Wall time is measured around the algorithm work only; evaluating the
round's loss for the metrics row happens outside the timer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .estimators import (
    EstimatorKind,
    EstimatorState,
    ScheduleSpec,
    estimator_init,
    estimator_update,
    rho,
)
from .metrics import RoundRecord, fw_gap
from .oracles import RoundLoss, grad_stochastic

__all__ = [
    "ALGORITHMS",
    "LearnerConfig",
    "FtplState",
    "LearnerState",
    "ftpl_init",
    "ftpl_predict",
    "ftpl_feedback",
    "init_state",
    "resolve_inner_steps",
    "orgfw_step",
    "osfw_step",
    "ofw_step",
    "morgfw_round",
    "run",
]

ALGORITHMS = ("ORGFW", "OSFW", "OFW", "MetaFW", "MORGFW")
_META = ("MetaFW", "MORGFW")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class LearnerConfig:
    algo: str
    schedule: ScheduleSpec = ScheduleSpec(alpha=1.0)
    K: int | None = None
    ftpl_scale: float = 1.0
    seed: int = 0
    noise: object | None = None  # None plays exact per-round gradients

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algo!r}, expected one of {ALGORITHMS}"
            )
        if self.K is not None and self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.ftpl_scale <= 0:
            raise ValueError(f"ftpl_scale must be > 0, got {self.ftpl_scale}")


@dataclass(eq=False)
class FtplState:
    """One perturbed-leader instance: accumulated feedback plus a fixed
    perturbation drawn once per run."""

    accumulated: np.ndarray
    perturbation: np.ndarray
    index: int


def ftpl_init(feasible_set, k: int, scale: float, T: int, seed: int) -> FtplState:
    rng = np.random.default_rng([seed & _MASK64, 2, k])
    pert = rng.uniform(0.0, scale * math.sqrt(T), size=feasible_set.dims)
    return FtplState(
        accumulated=np.zeros(feasible_set.dims), perturbation=pert, index=k
    )


def ftpl_predict(f: FtplState, feasible_set) -> np.ndarray:
    return feasible_set.lmo(f.accumulated + f.perturbation)


def ftpl_feedback(f: FtplState, linear_loss: np.ndarray) -> FtplState:
    if linear_loss.shape != f.accumulated.shape:
        raise ValueError("feedback shape does not match learner state")
    return FtplState(
        accumulated=f.accumulated + linear_loss,
        perturbation=f.perturbation,
        index=f.index,
    )


@dataclass(eq=False)
class LearnerState:
    x: np.ndarray
    x_init: np.ndarray
    round: int = 1
    est: EstimatorState | None = None
    ftpl: list[FtplState] = field(default_factory=list)
    history: list[RoundLoss] = field(default_factory=list)
    last_direction: np.ndarray | None = None


def resolve_inner_steps(cfg: LearnerConfig, T: int) -> int | None:
    """Default K: T for the recursive meta learner, ceil(T^1.5) for the
    plain one."""
    if cfg.algo not in _META:
        return None
    if cfg.K is not None:
        return cfg.K
    return T if cfg.algo == "MORGFW" else math.ceil(T**1.5)


def init_state(cfg: LearnerConfig, feasible_set, T: int, x0=None) -> LearnerState:
    x = feasible_set.initial_point() if x0 is None else np.asarray(x0, dtype=np.float64)
    if not feasible_set.contains(x, tol=1e-9):
        raise ValueError("initial point is not feasible")
    ftpl = []
    K = resolve_inner_steps(cfg, T)
    if K is not None:
        ftpl = [
            ftpl_init(feasible_set, k, cfg.ftpl_scale, T, cfg.seed)
            for k in range(1, K + 1)
        ]
    return LearnerState(x=x, x_init=x.copy(), ftpl=ftpl)


def _draw(rl: RoundLoss, w, cfg: LearnerConfig, t: int, k: int) -> np.ndarray:
    if cfg.noise is None:
        return rl.grad_exact(w)
    return grad_stochastic(rl, w, cfg.noise, t, k)


def orgfw_step(state: LearnerState, rl: RoundLoss, feasible_set,
               cfg: LearnerConfig):
    t = state.round
    x = state.x
    start = time.perf_counter_ns()
    step_size = rho(cfg.schedule, t)
    if state.est is None:
        est = estimator_init(EstimatorKind.RECURSIVE, _draw(rl, x, cfg, t, 0), x1=x)
    else:
        # both gradients share the realization keyed by (t, 0)
        g_new = _draw(rl, x, cfg, t, 0)
        g_old = _draw(rl, state.est.prev_x, cfg, t, 0)
        est = estimator_update(state.est, g_new, g_old, step_size)
    v = feasible_set.lmo(est.d)
    x_next = x + step_size * (v - x)
    elapsed = time.perf_counter_ns() - start
    est = replace(est, prev_x=x)
    new_state = replace(
        state, x=x_next, est=est, round=t + 1, last_direction=est.d
    )
    rec = RoundRecord(t=t, loss_value=rl.loss(x), wall_time_ns=elapsed)
    return new_state, rec


def osfw_step(state: LearnerState, rl: RoundLoss, feasible_set,
              cfg: LearnerConfig):
    t = state.round
    x = state.x
    start = time.perf_counter_ns()
    step_size = rho(cfg.schedule, t)
    g = _draw(rl, x, cfg, t, 0)
    if state.est is None:
        est = estimator_init(EstimatorKind.MOMENTUM_AVERAGE, g, x1=x)
    else:
        est = estimator_update(state.est, g, g, step_size)
    v = feasible_set.lmo(est.d)
    x_next = x + step_size * (v - x)
    elapsed = time.perf_counter_ns() - start
    est = replace(est, prev_x=x)
    new_state = replace(
        state, x=x_next, est=est, round=t + 1, last_direction=est.d
    )
    rec = RoundRecord(t=t, loss_value=rl.loss(x), wall_time_ns=elapsed)
    return new_state, rec


def ofw_step(state: LearnerState, rl: RoundLoss, feasible_set,
             cfg: LearnerConfig):
    t = state.round
    x = state.x
    state.history.append(rl)
    start = time.perf_counter_ns()
    step_size = rho(cfg.schedule, t)
    g = state.history[0].grad_exact(x)
    for past in state.history[1:]:
        g = g + past.grad_exact(x)
    g = g / t
    v = feasible_set.lmo(g)
    x_next = x + step_size * (v - x)
    elapsed = time.perf_counter_ns() - start
    new_state = replace(state, x=x_next, round=t + 1, last_direction=g)
    rec = RoundRecord(t=t, loss_value=rl.loss(x), wall_time_ns=elapsed)
    return new_state, rec


def morgfw_round(state: LearnerState, rl: RoundLoss, feasible_set,
                 cfg: LearnerConfig, inner_log: list | None = None):
    """One round of the meta learner.

    Prediction phase rebuilds the played point from the global initial
    point through K inner steps; feedback phase walks the same inner
    path once more, producing the k-th gradient estimate and handing it
    to learner k as its linear loss.
    """
    K = len(state.ftpl)
    if K == 0:
        raise ValueError("meta learner needs at least one inner learner (K >= 1)")
    t = state.round
    start = time.perf_counter_ns()
    xs = [state.x_init]
    vs = []
    x_cur = state.x_init
    for k in range(1, K + 1):
        v = ftpl_predict(state.ftpl[k - 1], feasible_set)
        eta = rho(cfg.schedule, k)
        x_cur = (1.0 - eta) * x_cur + eta * v
        vs.append(v)
        xs.append(x_cur)
    x_played = x_cur

    new_ftpl = list(state.ftpl)
    d = None
    for k in range(1, K + 1):
        # realization k is shared by the evaluations at x^(k) and x^(k-1)
        g_new = _draw(rl, xs[k - 1], cfg, t, k)
        if cfg.algo == "MORGFW" and k > 1:
            g_old = _draw(rl, xs[k - 2], cfg, t, k)
            d = g_new + (1.0 - rho(cfg.schedule, k)) * (d - g_old)
        else:
            d = g_new
        new_ftpl[k - 1] = ftpl_feedback(new_ftpl[k - 1], d)
        if inner_log is not None:
            inner_log.append((t, k, xs[k - 1], vs[k - 1], d))
    elapsed = time.perf_counter_ns() - start

    new_state = replace(
        state, x=x_played, round=t + 1, ftpl=new_ftpl, last_direction=None
    )
    rec = RoundRecord(t=t, loss_value=rl.loss(x_played), wall_time_ns=elapsed)
    return new_state, rec


_STEPS = {
    "ORGFW": orgfw_step,
    "OSFW": osfw_step,
    "OFW": ofw_step,
    "MetaFW": morgfw_round,
    "MORGFW": morgfw_round,
}


def run(cfg: LearnerConfig, stream, feasible_set, T: int,
        true_grad_fn=None, record_gap: bool = False, x0=None):
    """Drive a learner for T rounds; returns one record per round.

    ``true_grad_fn`` supplies the average-objective gradient when it is
    known (the synthetic quadratic); records then carry the estimator
    error, and gap values use it. Otherwise gaps fall back to the
    round's batch-mean gradient as the surrogate.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    state = init_state(cfg, feasible_set, T, x0=x0)
    step = _STEPS[cfg.algo]
    records: list[RoundRecord] = []
    for t in range(1, T + 1):
        rl = stream.round_loss(t)
        x_played = state.x if cfg.algo not in _META else None
        state, rec = step(state, rl, feasible_set, cfg)
        if x_played is None:
            x_played = state.x  # meta learners compute the played point in-step
        if true_grad_fn is not None:
            g_true = true_grad_fn(x_played)
            if state.last_direction is not None:
                rec.est_error = float(
                    np.linalg.norm(state.last_direction - g_true)
                )
            if record_gap:
                rec.fw_gap = fw_gap(g_true, x_played, feasible_set)
        elif record_gap:
            rec.fw_gap = fw_gap(rl.grad_exact(x_played), x_played, feasible_set)
        records.append(rec)
    return records
