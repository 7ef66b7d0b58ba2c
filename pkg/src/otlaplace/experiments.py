"""Batch experiment runners behind the CLI.

Five kinds: synthetic2d (Gaussian family, epsilon graph), pointcloud
(4-class shape benchmark or a loaded dataset, kNN graph), consistency
(discrete energy vs continuum quadrature on a translation family), rates
(empirical sampling-rate study) and tlp_demo (TL^2 convergence of sampled
function/measure pairs).  Every run writes CSV reports plus summary.json
and is byte-reproducible from (config, seed); trials are independent and
run in up to ``jobs`` worker processes with per-trial seeds seed XOR trial.
"""

import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .dataio import load_point_cloud_dataset
from .dirichlet import (
    BoxDensity,
    ContinuumSpec,
    PolyFunction,
    continuum_energy,
    graph_dirichlet_energy,
)
from .errors import ConfigError
from .graphs import Kernel, connectivity_epsilon, epsilon_graph, knn_graph, pairwise_distances
from .laplace_learn import predict_and_score, solve_p, solve_p2
from .lot import lot_embed, lot_pairwise
from .measures import (
    EmpiricalMeasure,
    GaussianFamilySpec,
    LabeledDataset,
    sample_gaussian_family,
    sample_translation_family,
)
from .rng import make_rng, trial_seed
from .shapes import sample_shape_family
from .tlp import FunctionOverMeasure, tlp_distance

_KINDS = ("synthetic2d", "pointcloud", "consistency", "rates", "tlp_demo")
_MASK_SALT = 0x6D61736B  # decorrelates the label mask stream from the data stream
_BASE_SALT = 0x62617365


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    out_dir: str = "."
    jobs: int = 1
    # classification experiments
    n_values: tuple = (800,)
    m: int = 100
    p: float = 2.0
    label_rates: tuple = (0.2,)
    trials: int = 10
    metric: str = "lot"
    k_neighbors: int | None = None
    epsilon_factor: float | None = None
    input_path: str | None = None
    noise: float = 0.04
    tilt: float = 0.5
    # consistency / tlp_demo
    base_m: int = 16
    resample_m: int | None = None
    fhat_coeff: float = 1.0
    quadrature_points: int = 64
    n_ref: int = 512
    # rates
    k_dim: int = 1
    m_values: tuple = (10, 40, 160, 640, 2560)
    proxy_m: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError("unknown experiment kind %r (choose from %s)" % (self.kind, list(_KINDS)))
        self.n_values = tuple(int(n) for n in np.atleast_1d(self.n_values))
        self.label_rates = tuple(float(r) for r in np.atleast_1d(self.label_rates))
        self.m_values = tuple(int(m) for m in np.atleast_1d(self.m_values))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if any(not 0 < r <= 1 for r in self.label_rates):
            raise ConfigError("label_rates must lie in (0, 1]")
        if self.kind in ("synthetic2d", "pointcloud"):
            policies = (self.k_neighbors is not None) + (self.epsilon_factor is not None)
            if policies != 1:
                raise ConfigError("set exactly one of k_neighbors / epsilon_factor")
            if self.metric not in ("lot", "w2"):
                raise ConfigError("metric must be 'lot' or 'w2'")
            if self.p < 2:
                raise ConfigError("p must be >= 2")
            if self.input_path is not None:
                self.n_values = (0,)  # actual n comes from the file
            elif any(n < 2 for n in self.n_values) or self.m < 1:
                raise ConfigError("need n >= 2 and m >= 1")
        if self.kind == "consistency" and self.epsilon_factor is None:
            self.epsilon_factor = 2.0

    @classmethod
    def from_dict(cls, doc: dict, kind: str | None = None) -> "ExperimentConfig":
        doc = dict(doc)
        if kind is not None:
            if "kind" in doc and doc["kind"] != kind:
                raise ConfigError("config kind %r conflicts with subcommand %r" % (doc["kind"], kind))
            doc["kind"] = kind
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % sorted(unknown))
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join("" if v is None else _fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _mask_dataset(dataset: LabeledDataset, rate: float, rng):
    """Reorder so a random labeled subset comes first; returns the masked
    dataset, the permuted truth and the labeled count."""
    n = dataset.n
    truth = np.array([int(lab) for lab in dataset.labels])
    n_lab = min(n, max(1, int(round(rate * n))))
    chosen = rng.choice(n, size=n_lab, replace=False)
    rest = np.setdiff1d(np.arange(n), chosen)
    perm = np.concatenate([chosen, rest])
    measures = [dataset.measures[i] for i in perm]
    labels = [int(truth[i]) for i in perm[:n_lab]] + [None] * (n - n_lab)
    masked = LabeledDataset(measures, labels, n_classes=dataset.n_classes)
    return masked, truth[perm], n_lab


_DATASET_CACHE: dict = {}


def _load_cached(path: str) -> LabeledDataset:
    if path not in _DATASET_CACHE:
        ds = load_point_cloud_dataset(path, strict=True)
        if ds.n_labeled != ds.n:
            raise ConfigError("experiment input must be fully labeled for scoring")
        _DATASET_CACHE[path] = ds
    return _DATASET_CACHE[path]


def _classification_trial(args) -> dict:
    (kind, n, rate, trial, cfg) = args
    seed_t = trial_seed(cfg.seed, trial)
    if kind == "synthetic2d":
        spec = GaussianFamilySpec(n=n, m=cfg.m)
        dataset = sample_gaussian_family(spec, seed_t)
    elif cfg.input_path is not None:
        dataset = _load_cached(cfg.input_path)
        n = dataset.n
    else:
        dataset = sample_shape_family(n, cfg.m, seed_t, noise=cfg.noise, tilt=cfg.tilt)
    mask_rng = make_rng(seed_t ^ _MASK_SALT)
    masked, truth, n_lab = _mask_dataset(dataset, rate, mask_rng)

    if cfg.metric == "lot":
        emb = lot_embed(masked.measures[0], masked)
        dists = lot_pairwise(emb)
    else:
        dists = pairwise_distances(masked, metric="w2")

    epsilon = None
    if cfg.epsilon_factor is not None:
        epsilon = cfg.epsilon_factor * connectivity_epsilon(dists)
        graph = epsilon_graph(dists, epsilon, Kernel.indicator())
    else:
        graph = knn_graph(dists, cfg.k_neighbors)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if cfg.p == 2:
            result = solve_p2(graph, masked, allow_unlabeled="majority")
        else:
            result = solve_p(graph, masked, p=cfg.p, allow_unlabeled="majority")
        accuracy = predict_and_score(result, truth, np.arange(n_lab))
    return {
        "n": n,
        "label_rate": rate,
        "trial": trial,
        "accuracy": accuracy,
        "epsilon": epsilon,
        "fallback": bool(result.notes),
    }


def _consistency_trial(args) -> dict:
    (n, trial, index, cfg) = args
    seed_t = trial_seed(cfg.seed, index)
    base_rng = make_rng(cfg.seed ^ _BASE_SALT)
    base = EmpiricalMeasure(0.05 * base_rng.standard_normal((cfg.base_m, 1)))
    rng = make_rng(seed_t)
    thetas = rng.random(n)
    dataset, _ = sample_translation_family(
        base, thetas[:, None], resample_m=cfg.resample_m, seed=seed_t ^ _MASK_SALT
    )
    dists = pairwise_distances(dataset, metric="w2")
    epsilon = cfg.epsilon_factor * connectivity_epsilon(dists)
    graph = epsilon_graph(dists, epsilon, Kernel.indicator(intrinsic_dim=1))
    f = cfg.fhat_coeff * thetas
    e_disc = graph_dirichlet_energy(graph, f, p=cfg.p)
    return {"n": n, "trial": trial, "epsilon": epsilon, "e_disc": e_disc}


def _map_tasks(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _aggregate(rows, keys, value="accuracy"):
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row[value])
    out = []
    for key in sorted(groups):
        vals = np.asarray(groups[key], dtype=float)
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        out.append(
            dict(
                zip(keys, key),
                mean=float(vals.mean()),
                std=float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
                se=se,
                ci95=1.96 * se,
                trials=len(vals),
            )
        )
    return out


def run_classification(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (cfg.kind, n, rate, t, cfg)
        for n in cfg.n_values
        for rate in cfg.label_rates
        for t in range(cfg.trials)
    ]
    rows = _map_tasks(_classification_trial, tasks, cfg.jobs)
    rows.sort(key=lambda r: (r["n"], r["label_rate"], r["trial"]))
    _write_csv(
        out / "accuracy.csv",
        "n,label_rate,trial,accuracy",
        [(r["n"], r["label_rate"], r["trial"], r["accuracy"]) for r in rows],
    )
    if cfg.epsilon_factor is not None:
        _write_csv(
            out / "epsilons.csv",
            "n,label_rate,trial,epsilon",
            [(r["n"], r["label_rate"], r["trial"], r["epsilon"]) for r in rows],
        )
    summary = {
        "kind": cfg.kind,
        "config": asdict(cfg),
        "aggregate": _aggregate(rows, ("n", "label_rate")),
        "fallback_trials": sum(1 for r in rows if r["fallback"]),
    }
    _write_json(out / "summary.json", summary)
    return summary


def run_consistency(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cspec = ContinuumSpec(
        d=1,
        density=BoxDensity.uniform([(0.0, 1.0)]),
        fhat=PolyFunction(linear=(cfg.fhat_coeff,)),
        kernel=Kernel.indicator(intrinsic_dim=1),
        p=cfg.p,
    )
    e_inf = continuum_energy(cspec, cfg.quadrature_points)
    tasks = []
    index = 0
    for n in cfg.n_values:
        for t in range(cfg.trials):
            tasks.append((n, t, index, cfg))
            index += 1
    rows = _map_tasks(_consistency_trial, tasks, cfg.jobs)
    rows.sort(key=lambda r: (r["n"], r["trial"]))
    for row in rows:
        row["e_inf"] = e_inf.value
        row["rel_error"] = abs(row["e_disc"] - e_inf.value) / e_inf.value
    _write_csv(
        out / "consistency.csv",
        "n,trial,epsilon,e_disc,e_inf,rel_error",
        [
            (r["n"], r["trial"], r["epsilon"], r["e_disc"], r["e_inf"], r["rel_error"])
            for r in rows
        ],
    )
    summary = {
        "kind": cfg.kind,
        "config": asdict(cfg),
        "e_inf": e_inf.value,
        "e_inf_error_estimate": e_inf.error_estimate,
        "aggregate": _aggregate(rows, ("n",), value="rel_error"),
    }
    _write_json(out / "summary.json", summary)
    return summary


def run_rates(cfg: ExperimentConfig) -> dict:
    from .rates import empirical_w2_rate, save_rate_report_csv, save_rate_report_json

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = empirical_w2_rate(
        cfg.k_dim, cfg.m_values, cfg.trials, proxy_m=cfg.proxy_m, seed=cfg.seed
    )
    save_rate_report_csv(report, out / "rates.csv")
    save_rate_report_json(report, out / "summary.json")
    return {
        "kind": cfg.kind,
        "fitted_slope": report.fitted_slope,
        "dominated": report.dominated().tolist(),
    }


def _quantile_rows(dataset: LabeledDataset) -> np.ndarray:
    return np.stack([np.sort(mu.points[:, 0]) for mu in dataset.measures])


def run_tlp_demo(cfg: ExperimentConfig) -> dict:
    """TL^2 distance from sampled (fhat, P_n) pairs to a fine reference pair."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base_rng = make_rng(cfg.seed ^ _BASE_SALT)
    base = EmpiricalMeasure(0.05 * base_rng.standard_normal((cfg.base_m, 1)))

    def family(n, seed):
        thetas = make_rng(seed).random(n)
        ds, _ = sample_translation_family(base, thetas[:, None], seed=seed)
        values = cfg.fhat_coeff * thetas
        return ds, FunctionOverMeasure(list(ds.measures), np.full(n, 1.0 / n), values)

    ref_ds, ref_pair = family(cfg.n_ref, trial_seed(cfg.seed, 10_000))
    ref_rows = _quantile_rows(ref_ds)
    results = []
    for n in cfg.n_values:
        ds, pair = family(n, trial_seed(cfg.seed, n))
        ground = cdist(_quantile_rows(ds), ref_rows) / np.sqrt(cfg.base_m)
        d = tlp_distance(pair, ref_pair, p=2.0, ground_matrix=ground)
        results.append({"n": n, "tlp_distance": d})
    _write_csv(
        out / "tlp.csv", "n,tlp_distance", [(r["n"], r["tlp_distance"]) for r in results]
    )
    summary = {"kind": cfg.kind, "config": asdict(cfg), "distances": results}
    _write_json(out / "summary.json", summary)
    return summary


def run_experiment(cfg: ExperimentConfig) -> dict:
    if cfg.kind in ("synthetic2d", "pointcloud"):
        return run_classification(cfg)
    if cfg.kind == "consistency":
        return run_consistency(cfg)
    if cfg.kind == "rates":
        return run_rates(cfg)
    return run_tlp_demo(cfg)
