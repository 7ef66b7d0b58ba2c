import csv
import json

import numpy as np
import pytest

from otlaplace.errors import ConfigError
from otlaplace.experiments import ExperimentConfig, run_experiment


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="synthetic2d")  # no graph policy
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="synthetic2d", k_neighbors=3, epsilon_factor=1.1)
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="synthetic2d", epsilon_factor=1.1, label_rates=(0.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="synthetic2d", epsilon_factor=1.1, trials=0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus_key": 1}, kind="rates")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "rates"}, kind="consistency")
    cfg = ExperimentConfig.from_dict({"trials": 3}, kind="rates")
    assert cfg.kind == "rates" and cfg.trials == 3


def small_cfg(out, **kw):
    base = dict(
        kind="synthetic2d",
        n_values=(60,),
        m=20,
        label_rates=(0.2, 0.6),
        trials=6,
        metric="lot",
        epsilon_factor=1.1,
        seed=13,
        out_dir=str(out),
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_synthetic2d_outputs(tmp_path):
    summary = run_experiment(small_cfg(tmp_path))
    rows = read_rows(tmp_path / "accuracy.csv")
    assert len(rows) == 12
    assert set(rows[0]) == {"n", "label_rate", "trial", "accuracy"}
    eps_rows = read_rows(tmp_path / "epsilons.csv")
    assert len(eps_rows) == 12 and float(eps_rows[0]["epsilon"]) > 0
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["kind"] == "synthetic2d"
    assert len(doc["aggregate"]) == 2
    assert summary["aggregate"][0]["trials"] == 6


def test_reports_byte_identical_across_reruns(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_experiment(small_cfg(out1))
    run_experiment(small_cfg(out2))
    for name in ("accuracy.csv", "epsilons.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    s1 = json.loads((out1 / "summary.json").read_text())
    s2 = json.loads((out2 / "summary.json").read_text())
    s1["config"].pop("out_dir"), s2["config"].pop("out_dir")
    assert s1 == s2


def test_jobs_do_not_change_results(tmp_path):
    out1, out2 = tmp_path / "serial", tmp_path / "par"
    run_experiment(small_cfg(out1, jobs=1))
    run_experiment(small_cfg(out2, jobs=2))
    assert (out1 / "accuracy.csv").read_bytes() == (out2 / "accuracy.csv").read_bytes()


def test_accuracy_nondecreasing_in_label_rate(tmp_path):
    # statistical trend: mean at the higher rate beats the lower rate minus
    # two pooled standard errors
    summary = run_experiment(small_cfg(tmp_path, trials=10))
    by_rate = {a["label_rate"]: a for a in summary["aggregate"]}
    low, high = by_rate[0.2], by_rate[0.6]
    pooled = np.hypot(low["se"], high["se"])
    assert high["mean"] >= low["mean"] - 2 * pooled


def test_epsilon_nonincreasing_in_n(tmp_path):
    cfg = small_cfg(tmp_path, n_values=(50, 100, 200, 400), label_rates=(0.2,), trials=6)
    summary = run_experiment(cfg)
    eps_rows = read_rows(tmp_path / "epsilons.csv")
    means = []
    for n in (50, 100, 200, 400):
        vals = [float(r["epsilon"]) for r in eps_rows if int(r["n"]) == n]
        means.append(np.mean(vals))
    violations = sum(1 for a, b in zip(means, means[1:]) if b > a)
    assert violations <= 1


def test_pointcloud_synthetic(tmp_path):
    cfg = ExperimentConfig(
        kind="pointcloud",
        n_values=(48,),
        m=48,
        label_rates=(0.5,),
        trials=2,
        metric="lot",
        k_neighbors=5,
        seed=3,
        out_dir=str(tmp_path),
    )
    summary = run_experiment(cfg)
    acc = summary["aggregate"][0]["mean"]
    assert 0.0 <= acc <= 1.0
    assert (tmp_path / "accuracy.csv").exists()
    assert not (tmp_path / "epsilons.csv").exists()  # kNN policy


def test_pointcloud_from_file(tmp_path):
    from otlaplace.dataio import save_dataset_binary
    from otlaplace.shapes import sample_shape_family

    ds = sample_shape_family(40, 32, seed=5)
    path = tmp_path / "clouds.otld"
    save_dataset_binary(ds, path)
    cfg = ExperimentConfig(
        kind="pointcloud",
        input_path=str(path),
        label_rates=(0.5,),
        trials=2,
        metric="lot",
        k_neighbors=4,
        seed=3,
        out_dir=str(tmp_path / "out"),
    )
    summary = run_experiment(cfg)
    rows = read_rows(tmp_path / "out" / "accuracy.csv")
    assert all(int(r["n"]) == 40 for r in rows)
    assert summary["aggregate"][0]["trials"] == 2


def test_consistency_run(tmp_path):
    cfg = ExperimentConfig(
        kind="consistency",
        n_values=(200, 400),
        trials=3,
        base_m=8,
        seed=1,
        out_dir=str(tmp_path),
    )
    summary = run_experiment(cfg)
    assert abs(summary["e_inf"] - 2 / 3) < 1e-3
    rows = read_rows(tmp_path / "consistency.csv")
    assert set(rows[0]) == {"n", "trial", "epsilon", "e_disc", "e_inf", "rel_error"}
    rels = [a["mean"] for a in summary["aggregate"]]
    assert all(r < 0.25 for r in rels)


def test_consistency_with_resampling(tmp_path):
    cfg = ExperimentConfig(
        kind="consistency",
        n_values=(150,),
        trials=2,
        base_m=8,
        resample_m=256,
        seed=1,
        out_dir=str(tmp_path),
    )
    summary = run_experiment(cfg)
    assert summary["aggregate"][0]["mean"] < 0.5


def test_rates_run(tmp_path):
    cfg = ExperimentConfig(
        kind="rates",
        m_values=(10, 40, 160),
        trials=10,
        k_dim=1,
        seed=0,
        out_dir=str(tmp_path),
    )
    summary = run_experiment(cfg)
    assert -0.8 < summary["fitted_slope"] < -0.3
    assert (tmp_path / "rates.csv").exists()


def test_tlp_demo_run(tmp_path):
    cfg = ExperimentConfig(
        kind="tlp_demo",
        n_values=(16, 32, 64),
        n_ref=128,
        base_m=8,
        seed=0,
        out_dir=str(tmp_path),
    )
    summary = run_experiment(cfg)
    dists = [r["tlp_distance"] for r in summary["distances"]]
    assert dists[-1] < dists[0]  # convergence toward the fine reference
