"""End-to-end acceptance checklist.

Each test covers one release criterion, runs it at its stated tolerance,
and records a single PASS/FAIL line; the session summary echoes the
whole checklist. Thresholds here are contractual: loosening them is not
an option, a red line means the library does not do what it claims.
"""

import time
from dataclasses import replace

import numpy as np

from onlinefw.algorithms import LearnerConfig, run
from onlinefw.estimators import (
    EstimatorKind,
    ScheduleSpec,
    estimator_init,
    estimator_update,
    rho,
)
from onlinefw.geometry import ColumnL1Ball, ProductSet, Simplex
from onlinefw.metrics import RoundRecord, attach_regret, regret_curve, solve_comparator
from onlinefw.oracles import (
    MinibatchSubsample,
    MulticlassLogistic,
    OneHiddenNN,
    RoundLoss,
    Sample,
    SyntheticQuadratic,
)
from onlinefw.stream import build_stream, synthetic_dataset
from onlinefw.verify import (
    concentration_probe,
    finite_difference_check,
    fit_regret_slope,
    product_identity_check,
    sequence_direct_sum,
    sequence_lemma_check,
)

REPORT: list = []


def record(tag: str, ok: bool, detail: str) -> None:
    line = f"[{tag}] {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT.append(line)
    print(line)
    assert ok, line


def test_a01_sequence_lemma():
    t0 = time.perf_counter()
    worst = max(sequence_lemma_check(a, 100_000).worst_ratio
                for a in (0.5, 2.0 / 3.0, 1.0))
    agreement = 0.0
    for alpha in (0.5, 2.0 / 3.0, 1.0):
        r = lambda t: (t + 1.0) ** -alpha
        s = (r(1) * (1.0 - r(2))) ** 2
        agreement = max(agreement,
                        abs(s / sequence_direct_sum(alpha, 2) - 1.0))
        for t in range(2, 200):
            s = (1.0 - r(t + 1)) ** 2 * (s + r(t) ** 2)
            direct = sequence_direct_sum(alpha, t + 1)
            agreement = max(agreement, abs(s / direct - 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1.0 + 1e-12 and agreement <= 1e-12 and elapsed < 2.0
    record("A01", ok,
           f"sequence lemma: worst s_t*(t+1)^a = {worst:.12f}, "
           f"recurrence-vs-direct rel = {agreement:.2e}, {elapsed:.2f}s")


def test_a02_product_identity():
    t0 = time.perf_counter()
    err = product_identity_check(1000)
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-10 and elapsed < 1.0
    record("A02", ok,
           f"product identity: max rel err {err:.2e} over r<=K<=1000, "
           f"{elapsed:.2f}s")


def test_a03_estimator_exactness():
    model = MulticlassLogistic(n_features=4, n_classes=3)
    rng = np.random.default_rng(11)
    batch = [
        Sample(features=rng.standard_normal(4),
               label=int(rng.integers(1, 4)))
        for _ in range(6)
    ]
    rl = RoundLoss(batch=batch, model=model)
    fset = ColumnL1Ball(radius=2.0, dims=(4, 3))
    spec = ScheduleSpec(alpha=1.0)
    x = fset.sample_point(rng)
    state = estimator_init(EstimatorKind.RECURSIVE, rl.grad_exact(x), x)
    worst = 0.0
    for t in range(2, 1001):
        x_new = fset.sample_point(rng)
        state = estimator_update(
            state, rl.grad_exact(x_new), rl.grad_exact(state.prev_x),
            rho(spec, t),
        )
        state = replace(state, prev_x=x_new)
        worst = max(worst,
                    float(np.abs(state.d - rl.grad_exact(x_new)).max()))
    ok = worst <= 1e-9
    record("A03", ok,
           f"recursive estimator on a fixed loss: worst inf-norm gap "
           f"{worst:.2e} for t <= 1000")


def test_a04_gradient_checks():
    rng = np.random.default_rng(3)
    logit = MulticlassLogistic(n_features=6, n_classes=4)
    batch = [Sample(features=rng.standard_normal(6),
                    label=int(rng.integers(1, 5))) for _ in range(9)]
    rl_log = RoundLoss(batch=batch, model=logit)
    err_log = finite_difference_check(
        rl_log, ColumnL1Ball(radius=2.0, dims=(6, 4)), n_points=20, h=1e-5
    )
    net = OneHiddenNN(n_features=5, hidden=3, n_classes=3)
    batch_nn = [Sample(features=rng.standard_normal(5),
                       label=int(rng.integers(1, 4))) for _ in range(7)]
    rl_nn = RoundLoss(batch=batch_nn, model=net)
    err_nn = finite_difference_check(
        rl_nn, ColumnL1Ball(radius=2.0, dims=net.dims), n_points=20,
        h=1e-5, n_directions=10,
    )
    ok = err_log <= 1e-5 and err_nn <= 1e-4
    record("A04", ok,
           f"gradient checks: logistic FD rel {err_log:.2e} (<= 1e-5), "
           f"network directional FD rel {err_nn:.2e} (<= 1e-4)")


def test_a05_lmo_vs_enumeration():
    rng = np.random.default_rng(17)
    sets = []
    for rows in range(1, 13):
        for cols in range(1, 12 // rows + 1):
            sets.append(ColumnL1Ball(radius=1.7, dims=(rows, cols)))
    for n in range(1, 13):
        sets.append(Simplex(scale=1.3, dims=(n, 1)))
    sets.append(Simplex(scale=0.8, dims=(3, 4)))
    sets.append(Simplex(scale=2.0, dims=(2, 6)))

    mismatches = 0
    for fset in sets:
        verts = np.stack([v.ravel() for v in fset.vertex_enumerate()])
        for _ in range(1000):
            d = rng.standard_normal(fset.dims)
            dots = verts @ d.ravel()
            v = fset.lmo(d)
            hit = np.flatnonzero((verts == v.ravel()).all(axis=1))
            if hit.size != 1 or dots[hit[0]] != dots.min():
                mismatches += 1
    ok = mismatches == 0
    record("A05", ok,
           f"lmo vs vertex enumeration: {mismatches} mismatches over "
           f"{len(sets)} sets x 1000 directions")


def test_a06_estimator_error_decay():
    t0 = time.perf_counter()
    probe = concentration_probe(
        A=np.eye(3), b=np.zeros(3),
        feasible_set=ColumnL1Ball(radius=1.0, dims=(3, 1)),
        sigma=1.0, alpha=1.0, T=1000, n_seeds=20, t_grid=(10, 100, 1000),
    )
    med = probe["median"]
    elapsed = time.perf_counter() - t0
    decade_ok = med[2] <= 10.0 * med[0]
    shape_ok = med[1] <= 1.2 * med[0] and med[2] <= 1.2 * med[1]
    ok = decade_ok and shape_ok and elapsed < 30.0
    record("A06", ok,
           f"normalized estimator error medians at t=(10,100,1000): "
           f"({med[0]:.3f}, {med[1]:.3f}, {med[2]:.3f}), {elapsed:.1f}s")


SLOPE_T_GRID = (512, 1024, 2048, 4096)


def _slope_problem():
    ds = synthetic_dataset(d=20, C=3, n=8192, separation=1.0, seed=0)
    model = MulticlassLogistic(n_features=20, n_classes=3)
    fset = ColumnL1Ball(radius=3.0, dims=(20, 3))
    return ds, model, fset


def test_a07_regret_slope():
    t0 = time.perf_counter()
    ds, model, fset = _slope_problem()
    medians = []
    for T in SLOPE_T_GRID:
        finals = []
        for s in range(5):
            stream = build_stream(ds, "stochastic", 32, T, s, model=model)
            cfg = LearnerConfig(
                algo="ORGFW", schedule=ScheduleSpec(alpha=1.0), seed=s,
                noise=MinibatchSubsample(size=1, seed=s),
            )
            records = run(cfg, stream, fset, T)
            comp = solve_comparator(stream.losses(), fset, iters=2000)
            finals.append(attach_regret(records, stream.losses(), comp)[-1])
        medians.append(float(np.median(finals)))
    fit = fit_regret_slope(SLOPE_T_GRID, medians)
    elapsed = time.perf_counter() - t0
    ok = 0.35 <= fit.slope <= 0.75 and elapsed < 120.0
    record("A07", ok,
           f"regret slope on T={SLOPE_T_GRID}: {fit.slope:.3f} "
           f"(window [0.35, 0.75], r^2 {fit.r_squared:.4f}), {elapsed:.0f}s")


def test_a08_stochastic_figure_trends():
    ds, model, fset = _slope_problem()
    T = 2048
    wins = 0
    for s in range(10):
        stream = build_stream(ds, "stochastic", 32, T, s, model=model)
        comp = solve_comparator(stream.losses(), fset, iters=2000)
        finals = {}
        for algo in ("ORGFW", "OSFW"):
            cfg = LearnerConfig(
                algo=algo, schedule=ScheduleSpec(alpha=1.0), seed=s,
                noise=MinibatchSubsample(size=4, seed=s),
            )
            records = run(cfg, stream, fset, T)
            finals[algo] = attach_regret(records, stream.losses(), comp)[-1]
        wins += finals["ORGFW"] <= finals["OSFW"]

    T_time = 200
    stream = build_stream(ds, "stochastic", 32, T_time, 0, model=model)
    times = {}
    for algo in ("ORGFW", "OFW"):
        cfg = LearnerConfig(algo=algo, schedule=ScheduleSpec(alpha=1.0), seed=0)
        records = run(cfg, stream, fset, T_time)
        times[algo] = float(np.median([r.wall_time_ns for r in records]))
    ok = wins >= 8 and times["ORGFW"] < times["OFW"]
    record("A08", ok,
           f"stochastic trends: recursive beats momentum averaging on "
           f"{wins}/10 shared streams (need >= 8); median round time "
           f"{times['ORGFW']:.0f}ns vs full-history {times['OFW']:.0f}ns")


def test_a09_gap_decay_trend():
    ds = synthetic_dataset(d=8, C=3, n=4096, separation=1.0, seed=0)
    model = OneHiddenNN(n_features=8, hidden=4, n_classes=3)
    fset = ProductSet(blocks=(
        ColumnL1Ball(radius=2.0, dims=(8, 4)),
        ColumnL1Ball(radius=2.0, dims=(4, 1)),
        ColumnL1Ball(radius=2.0, dims=(4, 3)),
        ColumnL1Ball(radius=2.0, dims=(3, 1)),
    ))
    mins = {}
    for T in (256, 2048):
        per_seed = []
        for s in range(5):
            stream = build_stream(ds, "stochastic", 16, T, s, model=model)
            cfg = LearnerConfig(
                algo="ORGFW", schedule=ScheduleSpec(alpha=2.0 / 3.0), seed=s,
                noise=MinibatchSubsample(size=4, seed=s),
            )
            records = run(cfg, stream, fset, T, record_gap=True)
            per_seed.append(min(r.fw_gap for r in records))
        mins[T] = float(np.median(per_seed))
    ok = mins[2048] <= mins[256] + 1e-12
    record("A09", ok,
           f"nonconvex gap decay: median min gap {mins[2048]:.4f} at T=2048 "
           f"vs {mins[256]:.4f} at T=256")


def _single_step_fw(stream, fset, T):
    x = fset.initial_point()
    records = []
    for t in range(1, T + 1):
        rl = stream.round_loss(t)
        records.append(RoundRecord(t=t, loss_value=rl.loss(x)))
        v = fset.lmo(rl.grad_exact(x))
        x = x + (v - x) / (t + 1.0)
    return records


def test_a10_adversarial_trend():
    t0 = time.perf_counter()
    T = 64
    wins = 0
    for s in range(10):
        ds = synthetic_dataset(d=10, C=3, n=512, separation=1.0, seed=s)
        model = MulticlassLogistic(n_features=10, n_classes=3)
        fset = ColumnL1Ball(radius=2.0, dims=(10, 3))
        stream = build_stream(ds, "adversarial", 8, T, s, model=model)
        comp = solve_comparator(stream.losses(), fset, iters=3000)
        cfg = LearnerConfig(algo="MORGFW", schedule=ScheduleSpec(alpha=1.0),
                            K=T, ftpl_scale=1.0, seed=s)
        records = run(cfg, stream, fset, T)
        meta_regret = attach_regret(records, stream.losses(), comp)[-1]
        base_regret = regret_curve(
            _single_step_fw(stream, fset, T), stream.losses(), comp
        )[-1]
        wins += meta_regret <= base_regret
    elapsed = time.perf_counter() - t0
    ok = wins >= 6 and elapsed < 120.0
    record("A10", ok,
           f"adversarial trend: meta learner beats single-step baseline on "
           f"{wins}/10 sorted streams (need >= 6), {elapsed:.0f}s")


def test_a11_determinism(tmp_path):
    from onlinefw.cli import parse_config, run_experiment

    overrides = [
        ("algorithm", ["ORGFW", "MORGFW"]),
        ("synthetic", {"d": 5, "C": 3, "n": 300}),
        ("T", 12),
        ("B", 8),
        ("seeds", [0, 1]),
        ("noise", {"kind": "minibatch", "size": 2}),
        ("comparator_iters", 100),
        ("output_dir", str(tmp_path / "run")),
    ]
    cfg = parse_config(None, overrides=overrides)
    run_experiment(cfg)

    def snapshot():
        out = {}
        for path in sorted((tmp_path / "run").glob("*.csv")):
            lines = path.read_text().strip().splitlines()
            out[path.name] = [ln.rsplit(",", 1)[0] for ln in lines]
        return out

    first = snapshot()
    run_experiment(cfg)
    second = snapshot()
    ok = first == second and len(first) == 2
    record("A11", ok,
           f"determinism: {len(first)} CSVs byte-identical across reruns "
           f"(timing column excluded)")
