"""Regret, Frank-Wolfe gap, comparators, and the high-probability bound.

The comparator is the fixed feasible point minimizing the cumulative
realized loss; regret curves are measured against it. On convex models
it is found by exact-gradient Frank-Wolfe over the aggregate average
loss (the synthetic quadratic gets its analytic minimizer when that
point is feasible), and the returned gap certifies the solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .oracles import OneHiddenNN, RoundLoss, SyntheticQuadratic

__all__ = [
    "RoundRecord",
    "Comparator",
    "BoundParams",
    "solve_comparator",
    "regret_curve",
    "attach_regret",
    "fw_gap",
    "theoretical_regret_bound",
]


@dataclass
class RoundRecord:
    """Per-round metrics row; optional fields default to NaN."""

    t: int
    loss_value: float
    cum_regret: float = math.nan
    est_error: float = math.nan
    fw_gap: float = math.nan
    wall_time_ns: int = 0

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"round index must be >= 1, got {self.t}")
        if self.wall_time_ns < 0:
            raise ValueError("wall_time_ns must be >= 0")


@dataclass
class Comparator:
    x_star: np.ndarray
    objective_value: float
    method_note: str
    certificate_gap: float = math.nan


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the high-probability regret bound.

    Q stands in for the initial suboptimality term when the average
    objective is not separately known.
    """

    L: float = 0.0
    D: float = 0.0
    sigma: float = 0.0
    sigma_hat: float = 0.0
    M: float = 0.0
    Q: float = 0.0
    delta: float = 0.05

    def __post_init__(self):
        for name in ("L", "D", "sigma", "sigma_hat", "M", "Q"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")


def _aggregate_loss(losses: list[RoundLoss]):
    """Dedupe samples across rounds into one weighted round loss.

    The aggregate average (1/T) sum_t f_t decomposes into a weighted
    per-sample reduction plus (for the quadratic) the core terms, which
    the models already evaluate given explicit weights.
    """
    model = losses[0].model
    T = len(losses)
    index: dict[int, int] = {}
    uniques: list = []
    weights: list[float] = []
    for rl in losses:
        if rl.model is not model:
            raise ValueError("all rounds must share one model instance")
        for s, w in zip(rl.batch, rl.weights):
            j = index.get(id(s))
            if j is None:
                index[id(s)] = len(uniques)
                uniques.append(s)
                weights.append(w / T)
            else:
                weights[j] += w / T
    X = np.stack([s.features for s in uniques])
    Y = np.array([s.label for s in uniques], dtype=np.int64)
    return model, X, Y, np.array(weights)


def solve_comparator(losses: list[RoundLoss], feasible_set,
                     iters: int = 10_000) -> Comparator:
    """Minimize the cumulative loss over the set with exact-gradient FW."""
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if not losses:
        raise ValueError("losses must be nonempty")
    model = losses[0].model
    if isinstance(model, OneHiddenNN):
        raise ValueError(
            "comparator is undefined for the nonconvex network model; "
            "track the Frank-Wolfe gap instead"
        )
    model, X, Y, w_agg = _aggregate_loss(losses)

    if isinstance(model, SyntheticQuadratic):
        # closed form when the unconstrained optimum is feasible
        rhs = -(model.b + model.perturb_scale * (X.T @ w_agg)[:, None])
        try:
            x_star = np.linalg.solve(model.A, rhs)
        except np.linalg.LinAlgError:
            x_star = None
        if x_star is not None and feasible_set.contains(x_star, tol=1e-9):
            gap = fw_gap(model.grad(x_star, X, Y, w_agg), x_star, feasible_set)
            return Comparator(
                x_star=x_star,
                objective_value=model.value(x_star, X, Y, w_agg),
                method_note="analytic interior minimizer",
                certificate_gap=gap,
            )

    x = feasible_set.initial_point()
    for k in range(1, iters + 1):
        g = model.grad(x, X, Y, w_agg)
        v = feasible_set.lmo(g)
        x = x + (2.0 / (k + 2.0)) * (v - x)
    g = model.grad(x, X, Y, w_agg)
    return Comparator(
        x_star=x,
        objective_value=model.value(x, X, Y, w_agg),
        method_note=f"frank-wolfe aggregate, iters={iters}",
        certificate_gap=fw_gap(g, x, feasible_set),
    )


def regret_curve(records, losses, comparator: Comparator) -> np.ndarray:
    """Cumulative sums of f_t(x_t) - f_t(x_star)."""
    if len(records) != len(losses):
        raise ValueError(
            f"got {len(records)} records but {len(losses)} round losses"
        )
    terms = np.array([
        rec.loss_value - rl.loss(comparator.x_star)
        for rec, rl in zip(records, losses)
    ])
    return np.cumsum(terms)


def attach_regret(records, losses, comparator: Comparator) -> np.ndarray:
    """Fill each record's cum_regret in place; returns the curve."""
    curve = regret_curve(records, losses, comparator)
    for rec, value in zip(records, curve):
        rec.cum_regret = float(value)
    return curve


def fw_gap(g, x, feasible_set) -> float:
    """<g, x> - min_v <g, v>; zero iff x minimizes the linearization."""
    v = feasible_set.lmo(g)
    return float(np.vdot(g, x) - np.vdot(g, v))


def theoretical_regret_bound(params: BoundParams, T: int) -> float:
    """High-probability regret bound for the recursive-estimator learner.

    (log T + 1) Q + L D^2 (log T + 1)^2 / 2
        + (16 L D^2 + 16 sigma D + 4 M) sqrt(2 T log(8T/delta))
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    log_term = math.log(T) + 1.0
    head = log_term * params.Q + params.L * params.D**2 * log_term**2 / 2.0
    tail = (16.0 * params.L * params.D**2 + 16.0 * params.sigma * params.D
            + 4.0 * params.M)
    return head + tail * math.sqrt(2.0 * T * math.log(8.0 * T / params.delta))
