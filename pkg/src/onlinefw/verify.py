"""Numerical checks for the analysis-side claims.

Covers the scalar sequence inequality behind the estimator-error
induction, the telescoping product identity behind the meta learner's
mixing weights, an empirical concentration probe for the estimator
error decay, finite-difference validation of the exact gradients, and
power-law slope fitting for regret curves. The battery at the bottom
aggregates everything into pass/fail rows for the command-line table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algorithms import LearnerConfig, init_state, orgfw_step, run
from .estimators import ScheduleSpec
from .geometry import ColumnL1Ball
from .oracles import (
    AdditiveGaussian,
    MulticlassLogistic,
    OneHiddenNN,
    RoundLoss,
    Sample,
    SyntheticQuadratic,
)
from .stream import build_stream, synthetic_dataset

__all__ = [
    "SequenceProbe",
    "SlopeFit",
    "CheckResult",
    "sequence_lemma_check",
    "sequence_direct_sum",
    "product_identity_check",
    "concentration_probe",
    "finite_difference_check",
    "fit_regret_slope",
    "verification_battery",
]


@dataclass(frozen=True)
class SequenceProbe:
    alpha: float
    t_max: int
    worst_ratio: float


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    t_grid: tuple


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def sequence_lemma_check(alpha: float, t_max: int) -> SequenceProbe:
    """Scan s_t * (t+1)^alpha for the worst ratio up to t_max.

    s_t is the squared-weight sum controlling the estimator error; the
    claim is s_t <= 1/(t+1)^alpha. The O(t) recurrence
    s_{t+1} = (1 - rho_{t+1})^2 (s_t + rho_t^2) follows from peeling
    one factor off every product term.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if t_max < 2:
        raise ValueError(f"t_max must be >= 2, got {t_max}")
    rho = lambda t: (t + 1.0) ** -alpha
    s = (rho(1) * (1.0 - rho(2))) ** 2
    worst = s * 3.0**alpha
    for t in range(2, t_max):
        s = (1.0 - rho(t + 1)) ** 2 * (s + rho(t) ** 2)
        worst = max(worst, s * (t + 2.0) ** alpha)
    return SequenceProbe(alpha=alpha, t_max=t_max, worst_ratio=worst)


def sequence_direct_sum(alpha: float, t: int) -> float:
    """O(t^2) definition of s_t, the oracle for the recurrence."""
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    rho = lambda k: (k + 1.0) ** -alpha
    total = 0.0
    for tau in range(2, t + 1):
        prod = rho(tau - 1)
        for k in range(tau, t + 1):
            prod *= 1.0 - rho(k)
        total += prod * prod
    return total


def product_identity_check(K_max: int) -> float:
    """Worst relative error of prod_{j=r}^K (1 - 1/(j+1)) vs r/(K+1)."""
    if K_max < 1:
        raise ValueError(f"K_max must be >= 1, got {K_max}")
    j = np.arange(1, K_max + 1, dtype=np.float64)
    factors = 1.0 - 1.0 / (j + 1.0)
    cp = np.concatenate([[1.0], np.cumprod(factors)])
    r = np.arange(1, K_max + 1, dtype=np.float64)
    # rows r, cols K: prefix quotient gives the product over j in [r, K]
    prod = np.outer(1.0 / cp[:-1], cp[1:])
    expected = np.outer(r, 1.0 / (np.arange(1, K_max + 1) + 1.0))
    rel = np.abs(prod / expected - 1.0)
    mask = np.triu(np.ones((K_max, K_max), dtype=bool))
    return float(rel[mask].max())


def concentration_probe(A, b, feasible_set, sigma: float, alpha: float,
                        T: int, n_seeds: int,
                        t_grid=(10, 100, 1000)) -> dict:
    """Quantiles of the normalized estimator error ||eps_t|| (t+1)^{a/2}.

    Runs the recursive learner on a fixed quadratic (so the average
    gradient is known exactly) with additive Gaussian noise, one run
    per seed.
    """
    if n_seeds < 2:
        raise ValueError(f"need at least 2 seeds, got {n_seeds}")
    t_grid = tuple(t for t in t_grid if t <= T)
    model = SyntheticQuadratic(A=A, b=b, perturb_scale=0.0)
    A_arr, b_arr = model.A, model.b
    true_grad = lambda x: A_arr @ x + b_arr
    normalized = np.empty((n_seeds, len(t_grid)))
    for s in range(n_seeds):
        ds = synthetic_dataset(d=model.n_features, C=1, n=4, separation=0.0,
                               seed=s)
        stream = build_stream(ds, "stochastic", B=1, T=T, seed=s, model=model)
        cfg = LearnerConfig(
            algo="ORGFW", schedule=ScheduleSpec(alpha=alpha),
            noise=AdditiveGaussian(sigma=sigma, seed=s), seed=s,
        )
        recs = run(cfg, stream, feasible_set, T=T, true_grad_fn=true_grad)
        errors = np.array([r.est_error for r in recs])
        for i, t in enumerate(t_grid):
            normalized[s, i] = errors[t - 1] * (t + 1.0) ** (alpha / 2.0)
    return {
        "t_grid": t_grid,
        "median": np.median(normalized, axis=0),
        "q90": np.quantile(normalized, 0.9, axis=0),
    }


def finite_difference_check(rl: RoundLoss, feasible_set, n_points: int = 20,
                            h: float = 1e-5, seed: int = 0,
                            n_directions: int | None = None) -> float:
    """Max relative central-difference error over random feasible points.

    Coordinate-wise below 64 entries; random directions beyond that (or
    when n_directions is given).
    """
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    rng = np.random.default_rng(seed)
    dims = feasible_set.dims
    use_directions = n_directions is not None or dims[0] * dims[1] > 64
    worst = 0.0
    for _ in range(n_points):
        w = feasible_set.sample_point(rng)
        g = rl.grad_exact(w)
        scale = max(1.0, float(np.abs(g).max()))
        if use_directions:
            for _ in range(n_directions or 50):
                u = rng.standard_normal(dims)
                u /= np.linalg.norm(u)
                fd = (rl.loss(w + h * u) - rl.loss(w - h * u)) / (2.0 * h)
                worst = max(worst, abs(fd - float(np.vdot(g, u))) / scale)
        else:
            for i in range(g.size):
                e = np.zeros(dims)
                e.flat[i] = h
                fd = (rl.loss(w + e) - rl.loss(w - e)) / (2.0 * h)
                worst = max(worst, abs(fd - g.flat[i]) / scale)
    return worst


def fit_regret_slope(t_grid, regrets) -> SlopeFit:
    """Least-squares slope of log(regret) against log(T).

    Nonpositive regret values cannot enter the log fit and are dropped;
    at least four points must survive.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    r = np.asarray(regrets, dtype=np.float64)
    if t.shape != r.shape:
        raise ValueError("t_grid and regrets must have equal length")
    keep = r > 0
    t, r = t[keep], r[keep]
    if len(t) < 4:
        raise ValueError(
            f"need >= 4 positive regret values for the fit, have {len(t)}"
        )
    lx, ly = np.log(t), np.log(r)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(
        slope=float(slope), intercept=float(intercept), r_squared=r2,
        t_grid=tuple(int(v) for v in t),
    )


def _battery_sequence() -> CheckResult:
    worst = max(
        sequence_lemma_check(a, 100_000).worst_ratio for a in (0.5, 2 / 3, 1.0)
    )
    return CheckResult(
        name="sequence inequality s_t*(t+1)^a <= 1 (t <= 1e5)",
        passed=worst <= 1.0 + 1e-12,
        detail=f"worst ratio {worst:.12f}",
    )


def _battery_sequence_agreement() -> CheckResult:
    worst = 0.0
    for alpha in (0.5, 1.0):
        r = lambda t: (t + 1.0) ** -alpha
        s = (r(1) * (1.0 - r(2))) ** 2
        for t in range(2, 201):
            direct = sequence_direct_sum(alpha, t)
            worst = max(worst, abs(s - direct) / direct)
            s = (1.0 - r(t + 1)) ** 2 * (s + r(t) ** 2)
    return CheckResult(
        name="recurrence vs direct sum (t <= 200)",
        passed=worst <= 1e-12,
        detail=f"worst rel diff {worst:.2e}",
    )


def _battery_product() -> CheckResult:
    err = product_identity_check(1000)
    return CheckResult(
        name="product identity prod(1-1/(j+1)) = r/(K+1) (K <= 1000)",
        passed=err <= 1e-10,
        detail=f"max rel err {err:.2e}",
    )


def _battery_estimator_exactness() -> CheckResult:
    A = np.diag([1.0, 2.0, 0.5])
    b = np.array([0.1, -0.3, 0.2])
    model = SyntheticQuadratic(A=A, b=b)
    ds = synthetic_dataset(d=3, C=1, n=4, separation=0.0, seed=0)
    stream = build_stream(ds, "stochastic", B=1, T=1000, seed=0, model=model)
    fset = ColumnL1Ball(radius=1.0, dims=(3, 1))
    cfg = LearnerConfig(algo="ORGFW")
    state = init_state(cfg, fset, T=1000)
    worst = 0.0
    for t in range(1, 1001):
        x = state.x
        state, _ = orgfw_step(state, stream.round_loss(t), fset, cfg)
        worst = max(worst, float(np.abs(state.last_direction - (A @ x + b.reshape(-1, 1))).max()))
    return CheckResult(
        name="recursive estimator exact on fixed loss (t <= 1000)",
        passed=worst <= 1e-9,
        detail=f"worst inf-norm err {worst:.2e}",
    )


def _battery_gradients() -> list[CheckResult]:
    rng = np.random.default_rng(0)
    out = []

    model = MulticlassLogistic(n_features=5, n_classes=3)
    batch = [
        Sample(features=rng.standard_normal(5), label=int(rng.integers(1, 4)))
        for _ in range(6)
    ]
    err = finite_difference_check(
        RoundLoss(batch=batch, model=model),
        ColumnL1Ball(radius=1.0, dims=(5, 3)), n_points=20,
    )
    out.append(CheckResult(
        name="finite differences: multiclass logistic",
        passed=err <= 1e-5, detail=f"max rel err {err:.2e}",
    ))

    nn = OneHiddenNN(n_features=4, hidden=4, n_classes=3)
    batch = [
        Sample(features=rng.standard_normal(4), label=int(rng.integers(1, 4)))
        for _ in range(5)
    ]
    err = finite_difference_check(
        RoundLoss(batch=batch, model=nn),
        ColumnL1Ball(radius=1.0, dims=nn.dims), n_points=10, n_directions=50,
    )
    out.append(CheckResult(
        name="finite differences: one-hidden-layer network (directional)",
        passed=err <= 1e-4, detail=f"max rel err {err:.2e}",
    ))

    quad = SyntheticQuadratic(A=np.diag([2.0, 1.0]), b=np.array([0.5, 0.0]))
    err = finite_difference_check(
        RoundLoss(batch=[Sample(features=np.zeros(2), label=1)], model=quad),
        ColumnL1Ball(radius=1.0, dims=(2, 1)), n_points=10,
    )
    out.append(CheckResult(
        name="finite differences: synthetic quadratic",
        passed=err <= 1e-9, detail=f"max rel err {err:.2e}",
    ))
    return out


def _battery_concentration() -> CheckResult:
    probe = concentration_probe(
        A=np.eye(3), b=np.zeros(3),
        feasible_set=ColumnL1Ball(radius=1.0, dims=(3, 1)),
        sigma=1.0, alpha=1.0, T=1000, n_seeds=20,
    )
    med = probe["median"]
    ok = med[-1] <= 10.0 * med[0]
    return CheckResult(
        name="normalized estimator error stays bounded (20 seeds)",
        passed=bool(ok),
        detail=f"median at t={probe['t_grid']}: {np.round(med, 4).tolist()}",
    )


def _battery_slope_sanity() -> CheckResult:
    t = (512, 1024, 2048, 4096)
    fit = fit_regret_slope(t, [math.sqrt(v) for v in t])
    ok = abs(fit.slope - 0.5) <= 1e-12 and abs(fit.r_squared - 1.0) <= 1e-12
    return CheckResult(
        name="slope fit exact on sqrt(T) input",
        passed=ok,
        detail=f"slope {fit.slope:.6f}, r2 {fit.r_squared:.6f}",
    )


def verification_battery() -> list[CheckResult]:
    """All fast checks, one result row each."""
    results = [
        _battery_sequence(),
        _battery_sequence_agreement(),
        _battery_product(),
        _battery_estimator_exactness(),
    ]
    results.extend(_battery_gradients())
    results.append(_battery_concentration())
    results.append(_battery_slope_sanity())
    return results
