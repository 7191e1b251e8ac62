"""Acceptance suite: every exit criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line per
criterion. Seeds are fixed; all Monte Carlo tolerances are deterministic given
the seeds. The heavy criteria assume the compiled kernel (the pure-Python
fallback passes too, just slowly).
"""

import json
import math
import time

import numpy as np

from surrmeta.asymptotics import (
    endpoint_covariance,
    endpoint_gradients,
    marginal_variances,
    p_vector,
    positivity_certificate,
)
from surrmeta.cli import main as cli_main
from surrmeta.model import ArmParams, TrialParams, derive_endpoints, scenario_table, to_joint
from surrmeta.regions import region_contains, wald_region
from surrmeta.sampling import simulate_trial
from surrmeta.streams import DOMAIN_PARAMS, SeedSpec, UnitStream, derive_state
from surrmeta.experiments import design, run_simulation

SCEN = scenario_table()
SEED = 20250810


def report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_simulation_table():
    """Mean fitted slope and rejection rates across designs A-D, N=1000."""
    t0 = time.perf_counter()
    results = {}
    for name in ("A", "B", "C", "D"):
        summ = run_simulation(design(name, N=1000), SEED)
        results[name] = (summ.mean_beta1, summ.rejection_rate)
    elapsed = time.perf_counter() - t0
    a, b, c, d = results["A"], results["B"], results["C"], results["D"]
    checks = [
        a[1] >= 0.85,
        0.80 <= a[0] <= 1.05,
        b[1] >= 0.75,
        0.35 <= c[0] <= 0.60,
        0.10 <= c[1] <= 0.25,
        0.03 <= d[1] <= 0.12,
        0.03 <= d[0] <= 0.22,
        elapsed <= 600.0,
    ]
    detail = (
        f"A slope {a[0]:.3f} rej {a[1]:.3f}; B slope {b[0]:.3f} rej {b[1]:.3f}; "
        f"C slope {c[0]:.3f} rej {c[1]:.3f}; D slope {d[0]:.3f} rej {d[1]:.3f}; "
        f"{elapsed:.1f}s"
    )
    report("criterion 1 (simulation table, N=1000)", all(checks), detail)


def test_criterion_2_positivity_certificate():
    """10,000 ordered random draws: A, B, cov12 all strictly positive."""
    from surrmeta.asymptotics import random_trial_params

    t0 = time.perf_counter()
    stream = UnitStream(derive_state(SEED, DOMAIN_PARAMS))
    min_a = min_b = min_cov = math.inf
    failures = 0
    for _ in range(10000):
        params = random_trial_params(stream)
        cert = positivity_certificate(params, 20000, 20000)
        min_a = min(min_a, cert.A)
        min_b = min(min_b, cert.B)
        min_cov = min(min_cov, cert.cov12)
        if not (cert.A > 0 and cert.B > 0 and cert.cov12 > 0 and cert.assumption_holds):
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed <= 10.0
    report(
        "criterion 2 (positivity certificate, 10k draws)",
        ok,
        f"failures {failures}, min A {min_a:.3g}, min B {min_b:.3g}, "
        f"min cov12 {min_cov:.3g}, {elapsed:.2f}s",
    )


def test_criterion_3_covariance_match():
    """Empirical covariance of standardized estimates vs analytic, 10%."""
    t0 = time.perf_counter()
    n = m = 100000
    worst = 0.0
    for idx, sc in enumerate(SCEN):
        truth = derive_endpoints(sc)
        ana = endpoint_covariance(sc, n, m).matrix()
        root_n = math.sqrt(n)
        xs, ys = [], []
        for t in range(5000):
            est = simulate_trial(sc, n, m, SeedSpec(SEED + idx, t, 0))
            xs.append(root_n * (est.S_hat - truth.S))
            ys.append(root_n * (est.M_hat - truth.M))
        emp = np.cov(np.vstack([xs, ys]))
        rel = np.max(np.abs(emp - ana) / np.abs(ana))
        worst = max(worst, float(rel))
    elapsed = time.perf_counter() - t0
    ok = worst < 0.10 and elapsed <= 300.0
    report(
        "criterion 3 (CLT covariance, 4 scenarios x 5000 reps)",
        ok,
        f"worst entrywise relative error {worst:.4f}, {elapsed:.1f}s",
    )


def test_criterion_4_gradient_oracle():
    """Analytic gradients vs central differences at step 1e-6 on 1000 points."""
    # truncation ~ (step/denominator)^2, so denominators stay >= 1.5e-3:
    # death probabilities in realistic lethality bands, small draws rejected
    stream = UnitStream(derive_state(SEED, DOMAIN_PARAMS, 4))
    h = 1e-6

    def endpoint_map(p):
        return np.array(
            [
                1.0 - (p[4] + p[5]) / (p[1] + p[2]),
                1.0 - (p[3] + p[5]) / (p[0] + p[2]),
            ]
        )

    def draw_point():
        while True:
            p_e = 0.001 + 0.099 * stream.next_float()
            p_l = 0.001 + 0.099 * stream.next_float()
            if p_e + p_l >= 0.15:
                continue
            arms = []
            for _ in range(2):
                d_l = 0.3 + 0.65 * stream.next_float()
                d_e = 0.02 + 0.26 * stream.next_float()
                arms.append(ArmParams(p_e, p_l, d_e, d_l))
            if arms[0].p_L < 1.5e-3 or arms[0].p_D() < 1.5e-3:
                continue
            return TrialParams(arms[0], arms[1])

    worst = 0.0
    for _ in range(1000):
        params = draw_point()
        p = p_vector(to_joint(params.control), to_joint(params.screen))
        g = endpoint_gradients(p)
        analytic = np.column_stack([g.grad_S, g.grad_M])
        for i in range(6):
            hi = np.array(p)
            lo = np.array(p)
            hi[i] += h
            lo[i] -= h
            fd = (endpoint_map(hi) - endpoint_map(lo)) / (2.0 * h)
            for jcol in range(2):
                a = analytic[i, jcol]
                if a == 0.0:
                    worst = max(worst, abs(fd[jcol]) * 1e-3)  # absolute, ~0
                else:
                    worst = max(worst, abs(fd[jcol] - a) / abs(a))
    ok = worst < 1e-6
    report(
        "criterion 4 (gradient finite-difference oracle, 1000 points)",
        ok,
        f"worst relative error {worst:.3g}",
    )


def test_criterion_5_wald_coverage():
    """90% regions for the null scenario cover (0,0) in 90% +- 2% of trials."""
    n = m = 100000
    sc = SCEN[0]
    cov = endpoint_covariance(sc, n, m)
    hits_true = 0
    hits_plugin = 0
    trials = 5000
    for t in range(trials):
        est = simulate_trial(sc, n, m, SeedSpec(SEED + 40, t, 0))
        region = wald_region(est, cov.var_S, cov.var_M, cov.rho, 0.10)
        if region_contains(region, (0.0, 0.0)):
            hits_true += 1
        var_s_hat, var_m_hat = marginal_variances(
            est.p_hat_L_C, est.p_hat_L_S, est.p_hat_D_C, est.p_hat_D_S, n, m
        )
        plug = wald_region(est, var_s_hat, var_m_hat, cov.rho, 0.10)
        if region_contains(plug, (0.0, 0.0)):
            hits_plugin += 1
    cov_true = hits_true / trials
    cov_plug = hits_plugin / trials
    ok = abs(cov_true - 0.90) <= 0.02 and abs(cov_plug - cov_true) <= 0.02
    report(
        "criterion 5 (Wald region coverage, 5000 trials)",
        ok,
        f"true-variance coverage {cov_true:.4f}, plug-in coverage {cov_plug:.4f}",
    )


def test_criterion_6_registry_fidelity():
    """Reconstructed registry reproduces the endpoint columns exactly."""
    expected = [(0.0, 0.0), (0.125, 0.0), (0.125, 0.15625), (0.0, 0.15625)]
    worst = 0.0
    for sc, (s, m_val) in zip(SCEN, expected):
        ep = derive_endpoints(sc)
        worst = max(worst, abs(ep.S - s), abs(ep.M - m_val))
    ok = worst <= 1e-12
    report("criterion 6 (scenario registry fidelity)", ok, f"worst deviation {worst:.3g}")


def test_criterion_7_determinism(tmp_path, capsys):
    """Repeated seeded invocations produce byte-identical files, including
    under parallel execution."""

    def tree(root):
        return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}

    ok = True
    details = []

    sim = ["simulate", "C", "--seed", "9", "--N", "30", "--n", "2000", "--m", "2000"]
    dirs = [tmp_path / f"sim{i}" for i in range(3)]
    assert cli_main(sim + ["--out-dir", str(dirs[0])]) == 0
    assert cli_main(sim + ["--out-dir", str(dirs[1])]) == 0
    assert cli_main(sim + ["--workers", "3", "--out-dir", str(dirs[2])]) == 0
    same_seq = tree(dirs[0]) == tree(dirs[1])
    same_par = tree(dirs[0]) == tree(dirs[2])
    ok &= same_seq and same_par
    details.append(f"simulate repeat={same_seq} parallel={same_par}")

    csv_text = (
        "trial_id,n_control,n_screen,late_control,late_screen,deaths_control,deaths_screen\n"
        "t1,39105,39101,220,212,118,108\n"
        "t2,101299,50623,340,160,150,70\n"
        "t3,101299,50623,340,170,150,75\n"
        "t4,50000,50000,120,80,18,9\n"
    )
    csv_path = tmp_path / "trials.csv"
    csv_path.write_text(csv_text)
    a1, a2 = tmp_path / "an1", tmp_path / "an2"
    assert cli_main(["analyze", str(csv_path), "--svg", "--out-dir", str(a1)]) == 0
    assert cli_main(["analyze", str(csv_path), "--svg", "--out-dir", str(a2)]) == 0
    same_analyze = tree(a1) == tree(a2)
    ok &= same_analyze
    details.append(f"analyze repeat={same_analyze}")

    t1, t2 = tmp_path / "t2a", tmp_path / "t2b"
    assert cli_main(["table2", "--seed", "4", "--out-dir", str(t1)]) == 0
    assert cli_main(["table2", "--seed", "4", "--workers", "2", "--out-dir", str(t2)]) == 0
    same_table = tree(t1) == tree(t2)
    names_ok = {"table2_N100.csv", "table2_N1000.csv"} <= set(tree(t1))
    ok &= same_table and names_ok
    details.append(f"table2 parallel={same_table} files={names_ok}")

    capsys.readouterr()
    report("criterion 7 (byte-identical determinism)", bool(ok), "; ".join(details))


def test_criterion_8_rho_sensitivity_geometry():
    """Ellipse area scales as sqrt(1 - rho^2) at fixed variances."""
    from surrmeta.sampling import EndpointEstimate

    est = EndpointEstimate(
        S_hat=0.05, M_hat=0.08, n=50000, m=50000,
        p_hat_L_C=0.02, p_hat_L_S=0.019, p_hat_D_C=0.016, p_hat_D_S=0.0147,
    )
    base = wald_region(est, 80.5, 123.0, 0.0, 0.10).area()
    worst = 0.0
    for rho in (0.1, 0.66, 0.9):
        area = wald_region(est, 80.5, 123.0, rho, 0.10).area()
        expected = base * math.sqrt(1.0 - rho * rho)
        worst = max(worst, abs(area - expected) / expected)
    ok = worst < 1e-9
    report(
        "criterion 8 (rho-sensitivity area geometry)",
        ok,
        f"worst relative deviation {worst:.3g}",
    )
