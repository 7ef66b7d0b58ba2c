"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines as they
complete.  Wall-clock budgets assume a 4-core desktop; trials run on up to
min(4, cpu_count) worker processes.
"""

import os
import time

import numpy as np
import pytest

from otlaplace.dirichlet import (
    FIRST_VARIATION_RATIO,
    energy_operator_ratio,
    graph_dirichlet_energy,
    graph_p_laplacian,
)
from otlaplace.experiments import ExperimentConfig, run_experiment
from otlaplace.laplace_learn import solve_p2
from otlaplace.lot import lot_embed, lot_pairwise
from otlaplace.measures import EmpiricalMeasure, sample_translation_family
from otlaplace.rates import empirical_w2_rate
from otlaplace.tlp import FunctionOverMeasure, tlp_distance
from otlaplace.transport import brute_force_ot, w2_exact

from conftest import node_dataset, random_connected_graph, random_measure

JOBS = min(4, os.cpu_count() or 1)
SEED = 20260810


def report(name, conditions):
    ok = all(conditions.values())
    detail = "; ".join("%s=%s" % (k, v) for k, v in conditions.items())
    line = "ACCEPTANCE %s: %s (%s)" % (name, "PASS" if ok else "FAIL", detail)
    print("\n" + line)
    assert ok, line


@pytest.fixture(scope="module")
def experiment1(tmp_path_factory):
    out = tmp_path_factory.mktemp("exp1")
    cfg = ExperimentConfig(
        kind="synthetic2d",
        n_values=(800,),
        m=100,
        label_rates=(0.2,),
        trials=100,
        metric="lot",
        epsilon_factor=1.1,
        seed=SEED,
        out_dir=str(out),
        jobs=JOBS,
    )
    start = time.perf_counter()
    summary = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    return summary["aggregate"][0], elapsed


def test_criterion_1_experiment1_reproduction(experiment1):
    agg, elapsed = experiment1
    report(
        "1 experiment-1 reproduction",
        {
            "mean_accuracy>=0.90": agg["mean"] >= 0.90,
            "mean": round(agg["mean"], 4),
            "runtime<=180s": elapsed <= 180.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_2_experiment1_trend(experiment1, tmp_path):
    agg1, _ = experiment1
    cfg = ExperimentConfig(
        kind="synthetic2d",
        n_values=(3200,),
        m=100,
        label_rates=(0.6,),
        trials=25,
        metric="lot",
        epsilon_factor=1.1,
        seed=SEED,
        out_dir=str(tmp_path),
        jobs=JOBS,
    )
    start = time.perf_counter()
    agg2 = run_experiment(cfg)["aggregate"][0]
    elapsed = time.perf_counter() - start
    pooled = float(np.hypot(agg1["se"], agg2["se"]))
    report(
        "2 experiment-1 trend",
        {
            "mean_accuracy>=0.97": agg2["mean"] >= 0.97,
            "mean": round(agg2["mean"], 4),
            "above_n800_minus_2se": agg2["mean"] > agg1["mean"] - 2 * pooled,
            "runtime<=600s": elapsed <= 600.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_3_pointcloud_benchmark(tmp_path):
    cfg = ExperimentConfig(
        kind="pointcloud",
        n_values=(400,),
        m=256,
        label_rates=(0.2, 0.8),
        trials=25,
        metric="lot",
        k_neighbors=15,
        seed=SEED,
        out_dir=str(tmp_path),
        jobs=JOBS,
    )
    summary = run_experiment(cfg)
    by_rate = {a["label_rate"]: a["mean"] for a in summary["aggregate"]}
    low, high = by_rate[0.2], by_rate[0.8]
    report(
        "3 point-cloud benchmark",
        {
            "gap>=3pts": high - low >= 0.03,
            "gap_pts": round(100 * (high - low), 2),
            "low>=baseline+30pts": low >= 0.25 + 0.30,
            "high>=baseline+30pts": high >= 0.25 + 0.30,
            "acc@0.2": round(low, 4),
            "acc@0.8": round(high, 4),
        },
    )


def test_criterion_4_ot_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    max_rel = 0.0
    max_marginal = 0.0
    for _ in range(500):
        m = int(rng.integers(1, 7))
        k = int(rng.integers(1, 4))
        mu = random_measure(rng, m=m, k=k, scale=2.0)
        nu = random_measure(rng, m=m, k=k, scale=2.0)
        d, plan = w2_exact(mu, nu)
        ref = brute_force_ot(mu, nu, 2.0)
        max_rel = max(max_rel, abs(d - ref) / max(ref, 1e-30) if ref else abs(d))
        max_marginal = max(max_marginal, *plan.marginal_errors())
    elapsed = time.perf_counter() - start
    report(
        "4 OT oracle equivalence",
        {
            "rel_error<=1e-9": max_rel <= 1e-9,
            "max_rel": "%.2e" % max_rel,
            "marginals<=1e-12": max_marginal <= 1e-12,
            "max_marginal": "%.2e" % max_marginal,
            "runtime<=10s": elapsed <= 10.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_5_harmonicity():
    rng = np.random.default_rng(SEED + 5)
    start = time.perf_counter()
    worst_residual = 0.0
    worst_violation = 0.0
    for _ in range(100):
        n = int(rng.integers(5, 201))
        g = random_connected_graph(rng, n, epsilon=float(rng.uniform(0.5, 2.0)))
        n_lab = int(rng.integers(1, max(2, n // 2)))
        c = int(rng.integers(2, 5))
        labels = [int(x) for x in rng.integers(0, c, n_lab)] + [None] * (n - n_lab)
        res = solve_p2(g, node_dataset(labels, n_classes=c))
        lf = graph_p_laplacian(g, res.values, 2.0)
        if n_lab < n:
            worst_residual = max(worst_residual, float(np.abs(lf[n_lab:]).max()))
        worst_violation = max(
            worst_violation,
            float(-res.values.min()),
            float(res.values.max() - 1.0),
        )
    elapsed = time.perf_counter() - start
    report(
        "5 harmonicity",
        {
            "residual<=1e-8*maxy": worst_residual <= 1e-8,
            "max_residual": "%.2e" % worst_residual,
            "max_principle_slack<=1e-9": worst_violation <= 1e-9,
            "max_violation": "%.2e" % worst_violation,
            "runtime<=30s": elapsed <= 30.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_6_energy_operator_duality():
    rng = np.random.default_rng(SEED + 6)
    ratio_ok = True
    first_var_ok = True
    worst_ratio_dev = 0.0
    worst_fv = 0.0
    for p in (2.0, 3.0, 4.0):
        expected = energy_operator_ratio(p)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            g = random_connected_graph(rng, n, epsilon=float(rng.uniform(0.5, 1.5)))
            f = rng.standard_normal(n)
            quad = float(np.mean(graph_p_laplacian(g, f, p) * f))
            energy = graph_dirichlet_energy(g, f, p)
            dev = abs(energy / quad - expected) / expected
            worst_ratio_dev = max(worst_ratio_dev, dev)
            ratio_ok &= dev <= 1e-10
        for _ in range(25):
            n = int(rng.integers(4, 30))
            g = random_connected_graph(rng, n)
            f = rng.standard_normal(n)
            direction = rng.standard_normal(n)
            inner = FIRST_VARIATION_RATIO * float(
                np.mean(graph_p_laplacian(g, f, p) * direction)
            )

            def deriv(delta):
                up = graph_dirichlet_energy(g, f + delta * direction, p)
                down = graph_dirichlet_energy(g, f - delta * direction, p)
                return (up - down) / (2 * delta)

            richardson = (100 * deriv(1e-5) - deriv(1e-4)) / 99
            err = abs(richardson - inner) / max(1.0, abs(inner))
            worst_fv = max(worst_fv, err)
            first_var_ok &= err <= 1e-6
    report(
        "6 energy/operator duality",
        {
            "ratio_4/p_to_1e-10": ratio_ok,
            "worst_ratio_dev": "%.2e" % worst_ratio_dev,
            "first_variation<=1e-6": first_var_ok,
            "worst_first_var": "%.2e" % worst_fv,
        },
    )


def test_criterion_7_consistency(tmp_path):
    cfg = ExperimentConfig(
        kind="consistency",
        n_values=(500, 1000, 2000),
        trials=8,
        base_m=16,
        seed=SEED,
        out_dir=str(tmp_path),
        jobs=JOBS,
    )
    start = time.perf_counter()
    summary = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    rel = {a["n"]: a["mean"] for a in summary["aggregate"]}
    report(
        "7 discrete-to-continuum consistency",
        {
            "rel@500<=0.15": rel[500] <= 0.15,
            "nonincreasing": rel[500] >= rel[1000] >= rel[2000],
            "rel@2000<=0.10": rel[2000] <= 0.10,
            "rel_errors": tuple(round(rel[n], 4) for n in (500, 1000, 2000)),
            "runtime<=120s": elapsed <= 120.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_8_sampling_rates():
    start = time.perf_counter()
    rep = empirical_w2_rate(1, [10, 40, 160, 640, 2560], trials=50, seed=SEED)
    elapsed = time.perf_counter() - start
    report(
        "8 sampling rates",
        {
            "slope_in_band": -0.60 <= rep.fitted_slope <= -0.40,
            "slope": round(rep.fitted_slope, 4),
            "dominated_by_Chat_qtilde": bool(rep.dominated().all()),
            "runtime<=60s": elapsed <= 60.0,
            "seconds": round(elapsed, 2),
        },
    )


def test_criterion_9_tlp_metric_axioms():
    rng = np.random.default_rng(SEED + 9)
    start = time.perf_counter()
    axioms_ok = True
    pool = []
    for _ in range(12):
        m = int(rng.integers(1, 6))
        pool.append(
            FunctionOverMeasure(
                rng.standard_normal((m, 2)) * 2,
                np.full(m, 1.0 / m),
                rng.standard_normal(m) * 2,
            )
        )
    for _ in range(200):
        i, j, l = rng.integers(0, len(pool), 3)
        a, b, c = pool[i], pool[j], pool[l]
        dab = tlp_distance(a, b, 2.0)
        axioms_ok &= dab >= 0
        axioms_ok &= dab == tlp_distance(b, a, 2.0)
        axioms_ok &= dab <= tlp_distance(a, c, 2.0) + tlp_distance(c, b, 2.0) + 1e-9
        axioms_ok &= tlp_distance(a, a, 2.0) <= 1e-9

    brute_ok = True
    worst = 0.0
    for _ in range(100):
        x, y = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        fa, fb = rng.standard_normal(2), rng.standard_normal(2)
        a = FunctionOverMeasure(x, [0.5, 0.5], fa)
        b = FunctionOverMeasure(y, [0.5, 0.5], fb)

        def lift(i, j):
            return np.linalg.norm(x[i] - y[j]) ** 2 + (fa[i] - fb[j]) ** 2

        best = min(0.5 * (lift(0, 0) + lift(1, 1)), 0.5 * (lift(0, 1) + lift(1, 0)))
        err = abs(tlp_distance(a, b, 2.0) - np.sqrt(best))
        worst = max(worst, err)
        brute_ok &= err <= 1e-12
    elapsed = time.perf_counter() - start
    report(
        "9 TLp metric axioms",
        {
            "axioms_200_instances": axioms_ok,
            "two_atom_brute_force": brute_ok,
            "worst_two_atom_err": "%.2e" % worst,
            "runtime<=10s": elapsed <= 10.0,
            "seconds": round(elapsed, 1),
        },
    )


def test_criterion_10_lot_exact_on_translations():
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 33))
        k = int(rng.integers(2, 4))
        base = EmpiricalMeasure(rng.standard_normal((m, k)))
        shifts = rng.standard_normal((3, k))
        ds, _ = sample_translation_family(base, shifts)
        emb = lot_embed(ds.measures[0], ds)
        lot_d = lot_pairwise(emb)
        for i in range(3):
            for j in range(i + 1, 3):
                w2, _ = w2_exact(ds.measures[i], ds.measures[j])
                worst = max(worst, abs(lot_d[i, j] - w2))
    report(
        "10 LOT exactness on translations",
        {
            "max_abs_gap<=1e-9": worst <= 1e-9,
            "max_abs_gap": "%.2e" % worst,
        },
    )
