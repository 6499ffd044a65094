"""End-to-end acceptance checks, one test per criterion.

Each test prints a single `criterion N: PASS/FAIL` line (echoed in the
terminal summary) and asserts the stated tolerances. Criterion 7 is a
strict expected failure; see its marker for the analysis.
"""
import time

import numpy as np
import pytest

from gspm import (
    ExperimentConfig,
    GraphonView,
    SampleBatch,
    build_kernel_matrix,
    builtin_kernel,
    chisq_weights,
    compare,
    compute_T_statistics,
    gaussian_variance,
    graph_limit_law,
    kernel_limit_law,
    nystrom_spectrum,
    run_experiment,
    sample_limit_law,
    sample_uniform,
    top_k_eigen,
    validate_assumptions,
    validation_grid,
    var_phi1_squared,
)
from gspm.rng import derive_seed

SEED = 20260818
RESULTS = []


def record(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def run_and_compare(config):
    run = run_experiment(config)
    return run, compare(run, run.law, config.master_seed)


def test_criterion_01_spectrum_recovery():
    t0 = time.perf_counter()
    est1 = nystrom_spectrum(builtin_kernel("W1"), 2000, 3)
    est2 = nystrom_spectrum(builtin_kernel("W2"), 2000, 3)
    elapsed = time.perf_counter() - t0
    err1 = max(abs(g - t) for g, t in zip(est1.eigenvalues, (0.5, 1.0 / 9.0, 1.0 / 30.0)))
    err2 = max(abs(g - t) for g, t in zip(est2.eigenvalues, (0.2, 1.0 / 9.0, 1.0 / 30.0)))
    ok = err1 < 5e-3 and err2 < 5e-3 and elapsed < 30.0
    record(1, ok, f"grid-spectrum errors {err1:.1e}, {err2:.1e}; {elapsed:.1f}s of 30s")


def test_criterion_02_law_parameters():
    w1 = builtin_kernel("W1")
    w2 = builtin_kernel("W2")
    var_ok = abs(var_phi1_squared(w1) - 0.8) < 1e-8
    weights, shift = chisq_weights(w2)
    weights_ok = abs(weights[0] - 0.25) < 1e-12 and abs(weights[1] - 0.04) < 1e-12
    shift_ok = abs(shift - 0.1455556) < 1e-7
    glaw, _ = graph_limit_law(GraphonView(w2, "strict"))
    alpha_ok = abs(glaw.mean - 0.7327160) < 1e-6
    sigma_ok = abs(glaw.variance - 0.2930864) < 1e-6
    ok = var_ok and weights_ok and shift_ok and alpha_ok and sigma_ok
    record(
        2,
        ok,
        f"Var(phi1^2)={var_phi1_squared(w1):.9f}, weights=({weights[0]:.4f},{weights[1]:.4f}), "
        f"shift={shift:.7f}, alpha={glaw.mean:.7f}, sigma2={glaw.variance:.7f}",
    )


def test_criterion_03_nondegenerate_gaussian():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        kernel_name="W1", mode="kernel-zeroed", n=1000, replications=500,
        master_seed=SEED, limit_samples=100_000, ks_threshold=0.12,
    )
    _, report = run_and_compare(cfg)
    elapsed = time.perf_counter() - t0
    ok = report.ks_distance <= 0.12 and 0.13 <= report.empirical_variance <= 0.30 and elapsed < 300.0
    record(3, ok, f"ks={report.ks_distance:.4f} of 0.12, var={report.empirical_variance:.4f} in [0.13,0.30]; {elapsed:.0f}s of 300s")


def test_criterion_04_degenerate_chisq():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        kernel_name="W2", mode="kernel-zeroed", n=100, replications=500,
        master_seed=SEED, limit_samples=100_000, ks_threshold=0.15,
    )
    _, report = run_and_compare(cfg)
    elapsed = time.perf_counter() - t0
    mean_ok = abs(report.empirical_mean - 0.1455556) <= 0.15
    ok = report.ks_distance <= 0.15 and mean_ok and elapsed < 60.0
    record(4, ok, f"ks={report.ks_distance:.4f} of 0.15, mean={report.empirical_mean:.4f} vs 0.1456; {elapsed:.0f}s of 60s")


def test_criterion_05_diagonal_included_chisq():
    cfg = ExperimentConfig(
        kernel_name="W2", mode="kernel-diag", n=100, replications=500,
        master_seed=SEED, limit_samples=100_000, ks_threshold=0.15,
    )
    _, report = run_and_compare(cfg)
    mean_ok = abs(report.empirical_mean - 0.29) <= 0.15
    ok = report.ks_distance <= 0.15 and mean_ok
    record(5, ok, f"ks={report.ks_distance:.4f} of 0.15, mean={report.empirical_mean:.4f} vs 0.29")


def test_criterion_06_degenerate_graph():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        kernel_name="W2", mode="graph", n=200, replications=500,
        master_seed=SEED, limit_samples=100_000, ks_threshold=0.18,
    )
    _, report = run_and_compare(cfg)
    elapsed = time.perf_counter() - t0
    mean_ok = abs(report.empirical_mean - 0.8783) <= 0.25
    var_ok = abs(report.empirical_variance - 0.4213) <= 0.6 * 0.4213
    ok = report.ks_distance <= 0.18 and mean_ok and var_ok and elapsed < 180.0
    record(
        6,
        ok,
        f"ks={report.ks_distance:.4f} of 0.18, mean={report.empirical_mean:.4f} vs 0.8783, "
        f"var={report.empirical_variance:.4f} vs 0.4213; {elapsed:.0f}s of 180s",
    )


@pytest.mark.xfail(
    strict=True,
    reason=(
        "clamping W1 into [0,1] changes the operator: the clamped graphon's top two "
        "eigenvalues are ~0.23022 and ~0.23002 (gap ~2e-4, far below the n=1000 "
        "fluctuation scale), so the spectral-gap assumption behind the Gaussian limit "
        "no longer holds, and the statistic centered at the declared lambda_1 = 1/2 "
        "sits near -8.5 instead of 0. No parameter choice passes; kept as an honest failure."
    ),
)
def test_criterion_07_clamped_graph_gaussian():
    cfg = ExperimentConfig(
        kernel_name="W1", mode="graph", n=1000, replications=200,
        master_seed=SEED, limit_samples=100_000, clamp=True, ks_threshold=0.2,
    )
    _, report = run_and_compare(cfg)
    mean_ok = abs(report.empirical_mean) <= 0.2
    ok = report.ks_distance <= 0.2 and mean_ok
    record(7, ok, f"ks={report.ks_distance:.4f} of 0.2, mean={report.empirical_mean:.4f} vs 0")


def test_criterion_08_t_statistics():
    w2 = builtin_kernel("W2")
    t1s, t2s = [], []
    for s in range(50):
        batch = sample_uniform(1000, derive_seed(SEED, s))
        lam = top_k_eigen(build_kernel_matrix(w2, batch), 1)[0].value
        t1, t2 = compute_T_statistics(w2, batch, lam)
        t1s.append(t1)
        t2s.append(t2)
    t1_mean = float(np.mean(t1s))
    t2_mean = float(np.mean(t2s))
    se = float(np.std(t2s, ddof=1) / np.sqrt(len(t2s)))
    t1_ok = abs(t1_mean - 0.3444444) <= 0.05
    t2_ok = abs(t2_mean - 0.29) <= 3 * se
    ok = t1_ok and t2_ok
    record(8, ok, f"T1 mean={t1_mean:.5f} vs 0.34444, T2 mean={t2_mean:.4f} vs 0.29 (3SE={3 * se:.4f})")


def test_criterion_09_property_suites():
    w1 = builtin_kernel("W1")
    w2 = builtin_kernel("W2")

    ortho_ok = all(validate_assumptions(k).orthonormality_defect <= 1e-8 for k in (w1, w2))

    bound_ok = True
    xs = validation_grid()
    for kernel in (w1, w2):
        rep = validate_assumptions(kernel)
        for lam, phi in kernel.components:
            sup_phi = np.max(np.abs(phi(xs)))
            if sup_phi > rep.sup_measured / abs(lam) * (1.0 + 1e-9):
                bound_ok = False

    n = 10_000
    band = np.log(n) / np.sqrt(n)
    ks = np.arange(1, n + 1) / n
    order_ok = all(
        np.max(np.abs(sample_uniform(n, seed).order_statistics() - ks)) <= band
        for seed in range(20)
    )

    batch = sample_uniform(60, 13)
    perm = np.random.default_rng(0).permutation(60)
    shuffled = SampleBatch(values=batch.values[perm].copy(), seed=batch.seed)
    eig_a = np.array([p.value for p in top_k_eigen(build_kernel_matrix(w1, batch), 3)])
    eig_b = np.array([p.value for p in top_k_eigen(build_kernel_matrix(w1, shuffled), 3)])
    perm_ok = np.max(np.abs(eig_a - eig_b)) <= 1e-10

    cfg = ExperimentConfig(kernel_name="W2", mode="kernel-zeroed", n=100, replications=30, master_seed=SEED)
    workers_ok = np.array_equal(run_experiment(cfg, workers=1).statistics, run_experiment(cfg, workers=8).statistics)

    ok = ortho_ok and bound_ok and order_ok and perm_ok and workers_ok
    record(
        9,
        ok,
        f"orthonormality={ortho_ok}, eigenfunction-bound={bound_ok}, "
        f"order-stats={order_ok}, permutation={perm_ok}, worker-determinism={workers_ok}",
    )


def test_criterion_10_degenerate_collapse():
    from gspm import constant_kernel

    w2 = builtin_kernel("W2")
    var_ok = gaussian_variance(w2) <= 1e-12
    law, _ = kernel_limit_law(constant_kernel(0.3), "zeroed")
    point_ok = law.weights == () and law.shift == 0.0
    draws = sample_limit_law(law, 5000, SEED)
    draws_ok = bool(np.all(draws == 0.0))
    ok = var_ok and point_ok and draws_ok
    record(10, ok, f"gaussian-variance={gaussian_variance(w2):.1e} of 1e-12, point-mass-at-0={point_ok and draws_ok}")
