"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they are produced; they are also repeated in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from oracles import polygon_moments
from ragclust.counting import brute_force_counts, count_graph
from ragclust.harness import ExperimentSpec, run_clt_experiment, run_convergence_experiment, run_sigma_scaling
from ragclust.model import AnnulusParams, RngSeed, build_adjacency, sample_positions
from ragclust.stats import (
    KernelParams,
    asymptotic_limit,
    conditional_moments,
    mean_h_conditional,
    sigma2_cubature,
    sigma2_monte_carlo,
)

CLT_PARAMS = AnnulusParams(10_000, 0.02, 0.005)


def test_1_oracle_equivalence(acceptance_report):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(3, 151))
        r1 = float(rng.uniform(0.0, 0.3))
        r2 = float(rng.uniform(0.0, r1))
        if r1 <= r2:
            r1 = 0.3
        p = AnnulusParams(n, r1, r2)
        ps = sample_positions(p, RngSeed(int(rng.integers(2**63))))
        mismatches += count_graph(ps, p) != brute_force_counts(build_adjacency(ps, p))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    acceptance_report("1 oracle equivalence", ok, f"{mismatches} mismatches in 200 instances, {elapsed:.1f} s")
    assert ok


def test_2_limit_formula(acceptance_report):
    checks = {
        "lambda=3": (asymptotic_limit(KernelParams(0.03, 0.01)), 0.1875),
        "lambda=4": (asymptotic_limit(KernelParams(0.04, 0.01)), 1 / 3),
        "r2=0": (asymptotic_limit(KernelParams(0.04, 0.0)), 0.75),
        "lambda=2+1e-9": (asymptotic_limit(KernelParams(0.02 * (1 + 5e-10), 0.01)), 0.0),
    }
    worst = max(abs(got - want) for got, want in checks.values())
    ok = worst <= 1e-12
    acceptance_report("2 limit formula", ok, f"max abs error {worst:.2e}")
    assert ok


def test_3_convergence(acceptance_report):
    base = ExperimentSpec(AnnulusParams(50_000, 0.006, 0.002), 50, master_seed=1)
    rows = {r.n: r for r in run_convergence_experiment(base, [10_000, 40_000, 50_000])}
    mean_err = abs(rows[50_000].mean_cn - 0.1875)
    ok = mean_err <= 0.01 and rows[40_000].mean_abs_dev < rows[10_000].mean_abs_dev
    acceptance_report(
        "3 convergence", ok,
        f"|mean - 0.1875| = {mean_err:.4f} at n=50000; mean |C_n - limit| "
        f"{rows[10_000].mean_abs_dev:.4f} (n=10000) -> {rows[40_000].mean_abs_dev:.4f} (n=40000)",
    )
    assert ok


def _clt(seed):
    spec = ExperimentSpec(CLT_PARAMS, 300, master_seed=seed, sigma_method="cubature", sigma_budget=400)
    summary, _, _ = run_clt_experiment(spec)
    ok = summary.ks_distance <= 0.094 and abs(summary.mean) <= 0.2 and 0.8 <= summary.sd <= 1.2
    return ok, summary


def test_4_clt_default_seed(acceptance_report):
    ok, s = _clt(1)
    acceptance_report("4 CLT (seed 1)", ok, f"KS {s.ks_distance:.4f}, mean {s.mean:.3f}, sd {s.sd:.3f}")
    assert ok


@pytest.mark.slow
def test_4_clt_alternative_seeds(acceptance_report):
    passed = sum(_clt(seed)[0] for seed in range(2, 22))
    ok = passed >= 18
    acceptance_report("4 CLT (20 alternative seeds)", ok, f"{passed}/20 seeds pass, need 18")
    assert ok


def test_5_variance_scaling(acceptance_report):
    rows = run_sigma_scaling(4.0, [0.01, 0.02, 0.04], budget=400, method="cubature")
    hi = max(r.ratio + 3 * r.ratio_se for r in rows)
    lo = min(r.ratio - 3 * r.ratio_se for r in rows)
    spread = max(r.ratio for r in rows) / min(r.ratio for r in rows)
    ok = lo > 0 and spread <= 1.15
    ratios = ", ".join(f"{r.ratio:.5f}" for r in rows)
    acceptance_report("5 variance scaling", ok, f"sigma2/r1^3 = {ratios}; max/min {spread:.4f} (bands up to {hi / lo:.4f})")
    assert ok


def test_6_degeneracy(acceptance_report):
    r1, r2 = 0.06, 0.02
    kp = KernelParams(r1, r2)
    worst = max(abs(mean_h_conditional(x1, kp, 2000)) for x1 in (0.0, 0.25, 0.7))
    # the closed forms, confirmed first on the polygon oracle and then on the cubature
    oracle = polygon_moments(r1, r2)
    m = conditional_moments(0.3, kp, 2000)
    tri_exact = 3 * (r1 - 2 * r2) ** 2
    path_exact = 4 * (r1 - r2) ** 2
    rel = max(
        abs(oracle["triangle"] / tri_exact - 1),
        abs(m["triangle"] / tri_exact - 1),
        abs(oracle["path_center_1"] / path_exact - 1),
        abs(m["path_center_1"] / path_exact - 1),
    )
    ok = worst <= 1e-5 and rel <= 1e-4
    acceptance_report("6 degeneracy", ok, f"max |E[h | X1]| {worst:.2e}; closed-form rel error {rel:.2e}")
    assert ok


def test_7_dual_estimators(acceptance_report):
    rng = np.random.default_rng(7)
    details, ok = [], True
    for i in range(5):
        r1 = float(rng.uniform(0.01, 0.1))
        r2 = float(rng.uniform(0.0, 0.5)) * r1
        kp = KernelParams(r1, r2)
        mc = sigma2_monte_carlo(kp, 10**7, RngSeed(100 + i))
        cub = sigma2_cubature(kp, 400)
        z = abs(mc.value - cub.value) / mc.std_error
        ok &= z <= 3
        details.append(f"{z:.2f}")
    acceptance_report("7 dual estimators", ok, f"|MC - cubature| / SE = {', '.join(details)}")
    assert ok


def test_8_determinism(acceptance_report, tmp_path):
    blobs = []
    for threads in (1, 4, 8):
        path = tmp_path / f"records_{threads}.csv"
        spec = ExperimentSpec(CLT_PARAMS, 40, master_seed=11, output_path=str(path))
        run_clt_experiment(spec, threads=threads)
        blobs.append(path.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    acceptance_report("8 determinism", ok, f"records for threads 1, 4, 8 {'identical' if ok else 'differ'}")
    assert ok
