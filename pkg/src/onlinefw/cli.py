"""Command-line entry point: seeded experiment runs with machine-readable
output.

Subcommands:

* ``run``        execute one config (possibly several algorithms and a
                 T grid), writing per-round CSVs and a JSON summary
* ``compare``    run several configs sharing the same stream seeds and
                 emit a joint summary with pairwise win rates
* ``verify``     print the numerical verification table
* ``comparator`` solve the best-fixed-point problem and cache it

Configs are YAML (JSON parses too) with flat ``key=value`` overrides.
All randomness flows from the seeds in the config; rerunning a config
reproduces every CSV byte except the wall-time column. The data
directory for the real datasets comes from ONLINEFW_DATA_DIR.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .algorithms import ALGORITHMS, LearnerConfig, run
from .estimators import ScheduleSpec
from .geometry import ColumnL1Ball, ProductSet
from .metrics import Comparator, attach_regret, solve_comparator
from .oracles import (
    AdditiveGaussian,
    MinibatchSubsample,
    MulticlassLogistic,
    OneHiddenNN,
    empirical_lipschitz,
    empirical_noise_bound,
)
from .stream import build_stream, load_cifar10, load_csv, load_idx, synthetic_dataset
from .verify import fit_regret_slope, verification_battery

__all__ = [
    "RunConfig",
    "parse_config",
    "build_problem",
    "run_experiment",
    "compare",
    "main",
]

DATA_DIR_ENV = "ONLINEFW_DATA_DIR"

CSV_FIELDS = ("seed", "t", "loss", "cum_regret", "est_error", "fw_gap",
              "wall_time_ns")

_VALID_KEYS = {
    "algorithm": "algorithm name or list (ORGFW, OSFW, OFW, MetaFW, MORGFW)",
    "dataset": "synthetic | mnist | cifar10 | csv",
    "synthetic": "mapping {d, C, n, separation}",
    "csv_path": "path to a label,f1..fd dataset file",
    "dataset_seed": "seed for synthetic data generation",
    "model": "logistic | nn",
    "mode": "stochastic | adversarial",
    "T": "rounds, integer or list of integers",
    "K": "inner steps for the meta learners",
    "B": "per-round batch size",
    "radius": "column-l1 radius for the weight matrix",
    "alpha": "schedule exponent in (0, 1]",
    "seeds": "list of run seeds",
    "noise": "mapping {kind: minibatch|gaussian, size, sigma}",
    "ftpl_scale": "perturbation scale for the inner leaders",
    "hidden": "hidden width of the nn model",
    "r_w": "weight-block radius for the nn model",
    "r_b": "bias-block radius for the nn model",
    "record_gap": "record per-round linearization gaps",
    "comparator_iters": "iterations for the best-fixed-point solve",
    "output_dir": "where CSV/JSON files go",
}

_SYNTHETIC_KEYS = {"d", "C", "n", "separation"}
_NOISE_KEYS = {"kind", "size", "sigma"}


@dataclass(frozen=True)
class RunConfig:
    algorithms: tuple
    dataset: str
    synthetic: dict | None
    csv_path: str | None
    dataset_seed: int
    model: str
    mode: str
    T_grid: tuple
    K: int | None
    B: int
    radius: float
    alpha: float
    seeds: tuple
    noise: dict | None
    ftpl_scale: float
    hidden: int
    r_w: float
    r_b: float
    record_gap: bool
    comparator_iters: int
    output_dir: str

    def stream_signature(self) -> tuple:
        """Everything that pins the loss sequence (fair-comparison key)."""
        return (
            self.dataset, tuple(sorted((self.synthetic or {}).items())),
            self.csv_path, self.dataset_seed, self.model, self.mode,
            tuple(self.T_grid), self.B, self.seeds,
        )


def _fail(msg: str):
    raise ValueError(msg)


def _parse_override(text: str):
    if "=" not in text:
        _fail(f"override {text!r} must look like key=value")
    key, _, raw = text.partition("=")
    return key.strip(), yaml.safe_load(raw)


def parse_config(path=None, overrides=None) -> RunConfig:
    """Load, override, validate, and fill paper defaults."""
    raw = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            _fail(f"{path}: config must be a mapping")
        raw.update(loaded)
    for item in overrides or []:
        if isinstance(item, str):
            key, value = _parse_override(item)
        else:
            key, value = item
        raw[key] = value

    unknown = set(raw) - set(_VALID_KEYS)
    if unknown:
        valid = ", ".join(sorted(_VALID_KEYS))
        _fail(
            f"unknown config key(s) {sorted(unknown)}; valid keys: {valid}"
        )

    if "algorithm" not in raw:
        _fail("missing required field 'algorithm'")
    algos = raw["algorithm"]
    if isinstance(algos, str):
        algos = [algos]
    for a in algos:
        if a not in ALGORITHMS:
            _fail(f"invalid algorithm {a!r}, expected one of {ALGORITHMS}")

    dataset = raw.get("dataset")
    if dataset is None:
        dataset = "synthetic" if "synthetic" in raw else None
    if dataset is None:
        _fail("missing dataset: set 'dataset' or provide a 'synthetic' mapping")
    if dataset not in ("synthetic", "mnist", "cifar10", "csv"):
        _fail(f"invalid dataset {dataset!r}")

    synthetic = raw.get("synthetic")
    if dataset == "synthetic":
        if not isinstance(synthetic, dict):
            _fail("synthetic dataset needs a mapping {d, C, n, separation}")
        unknown = set(synthetic) - _SYNTHETIC_KEYS
        if unknown:
            _fail(f"unknown synthetic key(s) {sorted(unknown)}")
        for k in ("d", "C", "n"):
            if k not in synthetic:
                _fail(f"synthetic dataset missing required field {k!r}")
        synthetic = dict(synthetic)
        synthetic.setdefault("separation", 1.0)
    if dataset == "csv" and not raw.get("csv_path"):
        _fail("dataset 'csv' needs csv_path")

    model = raw.get("model", "logistic")
    if model not in ("logistic", "nn"):
        _fail(f"invalid model {model!r}, expected logistic or nn")

    mode = raw.get("mode", "stochastic")
    if mode not in ("stochastic", "adversarial"):
        _fail(f"invalid mode {mode!r}")

    # paper-backed defaults keyed on the dataset and model
    if "T" in raw:
        T_raw = raw["T"]
    elif mode == "adversarial":
        T_raw = 100
    else:
        _fail("missing required field 'T'")
    T_grid = tuple(T_raw) if isinstance(T_raw, (list, tuple)) else (int(T_raw),)
    if any(int(t) < 1 for t in T_grid):
        _fail("all T values must be >= 1")
    T_grid = tuple(int(t) for t in T_grid)

    default_B = {"mnist": 600, "cifar10": 500}.get(dataset, 32)
    B = int(raw.get("B", default_B))
    default_radius = {"mnist": 8.0, "cifar10": 32.0}.get(dataset, 2.0)
    radius = float(raw.get("radius", default_radius))

    noise = raw.get("noise")
    if model == "nn" and noise is None:
        noise = {"kind": "minibatch", "size": 16}
    if noise is not None:
        if not isinstance(noise, dict) or "kind" not in noise:
            _fail("noise must be a mapping with a 'kind' field")
        unknown = set(noise) - _NOISE_KEYS
        if unknown:
            _fail(f"unknown noise key(s) {sorted(unknown)}")
        if noise["kind"] not in ("minibatch", "gaussian"):
            _fail(f"invalid noise kind {noise['kind']!r}")
        if noise["kind"] == "minibatch" and "size" not in noise:
            _fail("minibatch noise needs 'size'")
        if noise["kind"] == "gaussian" and "sigma" not in noise:
            _fail("gaussian noise needs 'sigma'")

    hidden = int(raw.get("hidden", 10))
    r_w = float(raw.get("r_w", 10.0))
    r_b = float(raw.get("r_b", 10.0))

    seeds = raw.get("seeds", [0])
    if isinstance(seeds, int):
        seeds = [seeds]
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        _fail("seeds must be nonempty")

    K = raw.get("K")
    if K is not None:
        K = int(K)
        if K < 1:
            _fail("K must be >= 1")

    alpha = float(raw.get("alpha", 1.0))
    if not (0.0 < alpha <= 1.0):
        _fail(f"alpha must be in (0, 1], got {alpha}")

    cfg = RunConfig(
        algorithms=tuple(algos),
        dataset=dataset,
        synthetic=synthetic if dataset == "synthetic" else None,
        csv_path=raw.get("csv_path"),
        dataset_seed=int(raw.get("dataset_seed", 0)),
        model=model,
        mode=mode,
        T_grid=T_grid,
        K=K,
        B=B,
        radius=radius,
        alpha=alpha,
        seeds=seeds,
        noise=noise,
        ftpl_scale=float(raw.get("ftpl_scale", 1.0)),
        hidden=hidden,
        r_w=r_w,
        r_b=r_b,
        record_gap=bool(raw.get("record_gap", False)),
        comparator_iters=int(raw.get("comparator_iters", 10_000)),
        output_dir=str(raw.get("output_dir", "runs")),
    )

    if cfg.mode == "adversarial" and cfg.dataset == "synthetic":
        n = int(cfg.synthetic["n"])
        worst_T = max(cfg.T_grid)
        if cfg.B * worst_T > n:
            _fail(
                f"adversarial mode needs B*T <= n, got {cfg.B}*{worst_T} > {n}"
            )
    return cfg


def _data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def load_dataset(cfg: RunConfig):
    if cfg.dataset == "synthetic":
        s = cfg.synthetic
        return synthetic_dataset(
            d=int(s["d"]), C=int(s["C"]), n=int(s["n"]),
            separation=float(s["separation"]), seed=cfg.dataset_seed,
        )
    if cfg.dataset == "csv":
        return load_csv(cfg.csv_path)
    root = _data_dir()
    if cfg.dataset == "mnist":
        return load_idx(
            root / "train-images-idx3-ubyte", root / "train-labels-idx1-ubyte"
        )
    return load_cifar10([root / f"data_batch_{i}.bin" for i in range(1, 6)])


def build_problem(cfg: RunConfig):
    """Dataset, model, and feasible set implied by the config."""
    ds = load_dataset(cfg)
    if cfg.model == "logistic":
        model = MulticlassLogistic(n_features=ds.d, n_classes=ds.C)
        fset = ColumnL1Ball(radius=cfg.radius, dims=(ds.d, ds.C))
    else:
        model = OneHiddenNN(n_features=ds.d, hidden=cfg.hidden, n_classes=ds.C)
        fset = ProductSet(blocks=(
            ColumnL1Ball(radius=cfg.r_w, dims=(ds.d, cfg.hidden)),
            ColumnL1Ball(radius=cfg.r_b, dims=(cfg.hidden, 1)),
            ColumnL1Ball(radius=cfg.r_w, dims=(cfg.hidden, ds.C)),
            ColumnL1Ball(radius=cfg.r_b, dims=(ds.C, 1)),
        ))
    return ds, model, fset


def _make_noise(cfg: RunConfig, seed: int):
    if cfg.noise is None:
        return None
    if cfg.noise["kind"] == "minibatch":
        return MinibatchSubsample(size=int(cfg.noise["size"]), seed=seed)
    return AdditiveGaussian(sigma=float(cfg.noise["sigma"]), seed=seed)


def _learner_config(cfg: RunConfig, algo: str, seed: int) -> LearnerConfig:
    return LearnerConfig(
        algo=algo,
        schedule=ScheduleSpec(alpha=cfg.alpha),
        K=cfg.K,
        ftpl_scale=cfg.ftpl_scale,
        seed=seed,
        noise=_make_noise(cfg, seed),
    )


def _comparator_cache_path(cfg: RunConfig, T: int, seed: int) -> Path:
    tag = f"{cfg.dataset}_{cfg.model}_{cfg.mode}_B{cfg.B}_T{T}_seed{seed}"
    return Path(cfg.output_dir) / "comparators" / f"{tag}.json"


def _load_cached_comparator(path: Path):
    if not path.exists():
        return None
    blob = json.loads(path.read_text())
    return Comparator(
        x_star=np.array(blob["x_star"]),
        objective_value=blob["objective_value"],
        method_note=blob["method_note"],
        certificate_gap=blob["certificate_gap"],
    )


def _save_comparator(path: Path, comp: Comparator) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({
        "x_star": comp.x_star.tolist(),
        "objective_value": comp.objective_value,
        "method_note": comp.method_note,
        "certificate_gap": comp.certificate_gap,
    }, indent=2, sort_keys=True))


def _comparator_for(cfg: RunConfig, stream, fset, T: int, seed: int,
                    use_cache: bool = True):
    if cfg.model == "nn":
        return None  # nonconvex: regret column stays empty, gaps carry it
    path = _comparator_cache_path(cfg, T, seed)
    if use_cache:
        cached = _load_cached_comparator(path)
        if cached is not None:
            return cached
    comp = solve_comparator(stream.losses(), fset, iters=cfg.comparator_iters)
    _save_comparator(path, comp)
    return comp


def _fmt(value: float) -> str:
    return repr(float(value))


def run_experiment(cfg: RunConfig) -> dict:
    """Execute every (algorithm, T, seed) cell and write CSVs + summary."""
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds, model, fset = build_problem(cfg)

    summary: dict = {"algorithms": {}, "dataset": ds.name, "model": cfg.model}
    for algo in cfg.algorithms:
        per_T: dict = {}
        for T in cfg.T_grid:
            csv_path = out_dir / f"{algo.lower()}_T{T}.csv"
            final_regret: list = []
            final_loss: list = []
            times: list = []
            with open(csv_path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_FIELDS)
                for seed in cfg.seeds:
                    stream = build_stream(ds, cfg.mode, cfg.B, T, seed,
                                          model=model)
                    records = run(
                        _learner_config(cfg, algo, seed), stream, fset, T,
                        record_gap=cfg.record_gap,
                    )
                    comp = _comparator_for(cfg, stream, fset, T, seed)
                    if comp is not None:
                        attach_regret(records, stream.losses(), comp)
                        final_regret.append(records[-1].cum_regret)
                    final_loss.append(records[-1].loss_value)
                    times.extend(r.wall_time_ns for r in records)
                    for r in records:
                        writer.writerow([
                            seed, r.t, _fmt(r.loss_value), _fmt(r.cum_regret),
                            _fmt(r.est_error), _fmt(r.fw_gap), r.wall_time_ns,
                        ])
            cell = {
                "csv": csv_path.name,
                "final_loss_per_seed": [float(v) for v in final_loss],
                "median_round_time_ns": float(np.median(times)),
            }
            if final_regret:
                arr = np.array(final_regret)
                cell["final_regret"] = {
                    "per_seed": [float(v) for v in arr],
                    "median": float(np.median(arr)),
                    "q25": float(np.quantile(arr, 0.25)),
                    "q75": float(np.quantile(arr, 0.75)),
                }
            per_T[str(T)] = cell
        entry: dict = {"per_T": per_T}
        if len(cfg.T_grid) >= 4 and all("final_regret" in per_T[str(T)]
                                        for T in cfg.T_grid):
            medians = [per_T[str(T)]["final_regret"]["median"]
                       for T in cfg.T_grid]
            try:
                fit = fit_regret_slope(cfg.T_grid, medians)
                entry["slope"] = {
                    "slope": fit.slope, "intercept": fit.intercept,
                    "r_squared": fit.r_squared, "t_grid": list(fit.t_grid),
                }
            except ValueError as exc:
                entry["slope"] = {"error": str(exc)}
        summary["algorithms"][algo] = entry

    summary["empirical"] = _empirical_constants(cfg, ds, model, fset)
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True)
    )
    return summary


def _empirical_constants(cfg: RunConfig, ds, model, fset) -> dict:
    """Measured stand-ins for the analysis constants on this problem."""
    T_probe = min(max(cfg.T_grid), 64)
    stream = build_stream(ds, cfg.mode, cfg.B, T_probe, cfg.seeds[0],
                          model=model)
    rl = stream.round_loss(1)
    out = {
        "L": empirical_lipschitz(rl, fset, n_pairs=30, seed=0),
        "D": fset.diameter,
    }
    noise = _make_noise(cfg, cfg.seeds[0])
    if noise is not None:
        out["sigma"] = empirical_noise_bound(
            rl, fset.initial_point(), noise, n_draws=50
        )
    x0 = fset.initial_point()
    vals = np.array([stream.round_loss(t).loss(x0)
                     for t in range(1, T_probe + 1)])
    out["M"] = float(np.abs(vals - vals.mean()).max())
    return out


def compare(config_paths, output_path=None, overrides=None) -> dict:
    """Run several configs over the same streams and tabulate win rates."""
    if len(config_paths) < 2:
        raise ValueError("compare needs at least two configs")
    cfgs = [parse_config(p, overrides=overrides) for p in config_paths]
    signature = cfgs[0].stream_signature()
    for other, path in zip(cfgs[1:], config_paths[1:]):
        if other.stream_signature() != signature:
            raise ValueError(
                f"{path}: stream settings (dataset/mode/B/T/seeds) differ "
                "from the first config; comparison would be unfair"
            )
    seen: dict = {}
    for cfg, path in zip(cfgs, config_paths):
        for algo in cfg.algorithms:
            if algo in seen:
                raise ValueError(
                    f"algorithm {algo} appears in both {seen[algo]} and {path}"
                )
            seen[algo] = path

    summaries = {}
    for cfg in cfgs:
        summary = run_experiment(cfg)
        summaries.update(summary["algorithms"])

    T_last = str(max(cfgs[0].T_grid))
    joint: dict = {"T": int(T_last), "seeds": list(cfgs[0].seeds),
                   "algorithms": {}, "win_rates": {}}
    finals = {}
    for algo, entry in summaries.items():
        cell = entry["per_T"][T_last]
        joint["algorithms"][algo] = {
            "median_round_time_ns": cell["median_round_time_ns"],
        }
        if "final_regret" in cell:
            joint["algorithms"][algo]["final_regret_median"] = (
                cell["final_regret"]["median"]
            )
            finals[algo] = cell["final_regret"]["per_seed"]
    names = sorted(finals)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ra, rb = np.array(finals[a]), np.array(finals[b])
            wins = float(np.mean(np.where(ra < rb, 1.0,
                                          np.where(ra > rb, 0.0, 0.5))))
            joint["win_rates"][f"{a} vs {b}"] = wins
    if output_path is not None:
        Path(output_path).write_text(json.dumps(joint, indent=2, sort_keys=True))
    return joint


def _cmd_run(args) -> int:
    cfg = parse_config(args.config, overrides=args.set or [])
    summary = run_experiment(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    joint = compare(args.configs, output_path=args.output,
                    overrides=args.set or [])
    print(json.dumps(joint, indent=2, sort_keys=True))
    return 0


def _cmd_verify(_args) -> int:
    results = verification_battery()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name.ljust(width)}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _cmd_comparator(args) -> int:
    cfg = parse_config(args.config, overrides=args.set or [])
    if cfg.model == "nn":
        print("comparator is undefined for the nonconvex model", file=sys.stderr)
        return 1
    ds, model, fset = build_problem(cfg)
    for T in cfg.T_grid:
        for seed in cfg.seeds:
            stream = build_stream(ds, cfg.mode, cfg.B, T, seed, model=model)
            comp = solve_comparator(stream.losses(), fset,
                                    iters=cfg.comparator_iters)
            path = _comparator_cache_path(cfg, T, seed)
            _save_comparator(path, comp)
            print(f"T={T} seed={seed} value={comp.objective_value:.6f} "
                  f"gap={comp.certificate_gap:.3e} -> {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="onlinefw",
        description="Projection-free online learning experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config", help="YAML/JSON config file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key")
    p_run.set_defaults(fn=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run configs on shared streams")
    p_cmp.add_argument("configs", nargs="+", help="two or more config files")
    p_cmp.add_argument("--output", help="path for the joint JSON")
    p_cmp.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_ver = sub.add_parser("verify", help="numerical verification table")
    p_ver.set_defaults(fn=_cmd_verify)

    p_comp = sub.add_parser("comparator", help="solve and cache best fixed points")
    p_comp.add_argument("config")
    p_comp.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_comp.set_defaults(fn=_cmd_comparator)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
