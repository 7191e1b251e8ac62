"""Inference tests: OLS fits, slope t-test, correlation intervals, and the
Student-t tail against a high-precision quadrature oracle."""

import math
import random
import statistics

import pytest
from mpmath import gamma as mp_gamma
from mpmath import inf as mp_inf
from mpmath import mp, mpf
from mpmath import pi as mp_pi
from mpmath import quad as mp_quad
from mpmath import sqrt as mp_sqrt

from surrmeta.asymptotics import endpoint_covariance
from surrmeta.errors import DomainError, InsufficientDataError, NonIdentifiableError
from surrmeta.inference import fit_summary, ols_fit, pearson_ci, student_t_sf
from surrmeta.model import derive_endpoints, scenario_table
from surrmeta.sampling import simulate_trial
from surrmeta.streams import SeedSpec

SCEN = scenario_table()


def sf_oracle(t, df):
    """Student-t upper tail by direct quadrature of the density (40 digits)."""
    mp.dps = 40
    nu = mpf(df)
    c = mp_gamma((nu + 1) / 2) / (mp_sqrt(nu * mp_pi) * mp_gamma(nu / 2))
    return float(mp_quad(lambda x: c * (1 + x * x / nu) ** (-(nu + 1) / 2), [mpf(t), mp_inf]))


# --- student_t_sf -----------------------------------------------------------


def test_t_sf_symmetry_at_zero():
    for df in (1, 2, 8, 30):
        assert student_t_sf(0.0, df) == pytest.approx(0.5, abs=1e-14)


def test_t_sf_cauchy_quartile():
    assert student_t_sf(1.0, 1) == pytest.approx(0.25, abs=1e-12)


def test_t_sf_classic_critical_value():
    assert student_t_sf(2.306, 8) == pytest.approx(0.025, abs=5e-4)


@pytest.mark.parametrize("t", [-5.0, -1.3, 0.0, 0.5, 1.0, 2.306, 7.5, 30.0])
@pytest.mark.parametrize("df", [1, 2, 5, 8, 30, 120])
def test_t_sf_against_quadrature_oracle(t, df):
    assert abs(student_t_sf(t, df) - sf_oracle(t, df)) < 1e-10


def test_t_sf_domain_and_extremes():
    with pytest.raises(DomainError):
        student_t_sf(1.0, 0)
    assert student_t_sf(math.inf, 5) == 0.0
    assert student_t_sf(-math.inf, 5) == 1.0


# --- ols_fit ----------------------------------------------------------------


def test_collinear_line():
    fit = ols_fit([(0, 0), (1, 1), (2, 2)])
    assert fit.beta1_hat == pytest.approx(1.0, abs=1e-15)
    assert fit.beta0_hat == pytest.approx(0.0, abs=1e-15)
    assert all(abs(e) < 1e-15 for e in fit.residuals)
    assert fit.p_value == 0.0  # zero residual variance, nonzero slope


def test_exact_negative_slope():
    fit = ols_fit([(0, 1), (1, 0), (2, -1)])
    assert fit.beta1_hat == pytest.approx(-1.0, abs=1e-15)
    assert fit.beta0_hat == pytest.approx(1.0, abs=1e-15)


def test_equal_weights_reproduce_unweighted():
    rng = random.Random(4)
    pairs = [(rng.random(), rng.random()) for _ in range(10)]
    a = ols_fit(pairs)
    b = ols_fit(pairs, weights=[2.5] * 10)
    assert a.beta1_hat == b.beta1_hat
    assert a.beta0_hat == b.beta0_hat
    assert a.se_beta1 == b.se_beta1
    assert b.weighted


def test_weighted_fit_pulls_toward_heavy_points():
    pairs = [(0, 0), (1, 1), (2, 0)]
    heavy_last = ols_fit(pairs, weights=[1, 1, 100])
    heavy_first = ols_fit(pairs, weights=[100, 1, 1])
    assert heavy_last.beta1_hat < ols_fit(pairs).beta1_hat < heavy_first.beta1_hat


def test_noise_regression_slope_matches_analytic_value():
    # 1000 null-scenario trials: the fitted slope estimates the pure
    # sampling-noise regression cov/var_S = rho*sqrt(var_M/var_S) = 0.93622
    cov = endpoint_covariance(SCEN[0], 20000, 20000)
    target = cov.rho * math.sqrt(cov.var_M / cov.var_S)
    pairs = []
    for t in range(1000):
        est = simulate_trial(SCEN[0], 20000, 20000, SeedSpec(2718, t, 0))
        pairs.append((est.S_hat, est.M_hat))
    fit = ols_fit(pairs)
    assert fit.beta1_hat == pytest.approx(target, abs=0.1)
    assert target == pytest.approx(0.9362244897959183, rel=1e-12)


def test_affine_equivariance():
    rng = random.Random(9)
    pairs = [(rng.random(), rng.gauss(0, 1)) for _ in range(12)]
    base = ols_fit(pairs)
    for a, b in ((3.0, -2.0), (-1.5, 0.25)):
        mapped = ols_fit([(x, a + b * y) for x, y in pairs])
        assert mapped.beta1_hat == pytest.approx(b * base.beta1_hat, rel=1e-9)
        assert abs(mapped.t_stat) == pytest.approx(abs(base.t_stat), rel=1e-9)


def test_permutation_invariance():
    rng = random.Random(10)
    pairs = [(rng.random(), rng.random()) for _ in range(9)]
    base = ols_fit(pairs)
    shuffled = pairs[::-1]
    rng.shuffle(shuffled)
    other = ols_fit(shuffled)
    # fsum makes every aggregate exactly rounded, hence order-free
    assert other.beta1_hat == base.beta1_hat
    assert other.se_beta1 == base.se_beta1
    assert other.r_pearson == base.r_pearson


def test_residuals_sum_to_zero():
    rng = random.Random(12)
    pairs = [(rng.random(), 2 + rng.gauss(0, 0.5)) for _ in range(15)]
    fit = ols_fit(pairs)
    scale = max(abs(y) for _, y in pairs)
    assert abs(math.fsum(fit.residuals)) < 1e-10 * scale


def test_oracle_and_practical_agree_in_no_noise_limit():
    # heterogeneous truth: two copies of each registry scenario. The oracle
    # fit on true pairs has slope 0 by the registry's balanced construction;
    # estimates at n = m = 1e7 must converge to it.
    truths = [derive_endpoints(sc) for sc in SCEN] * 2
    oracle = ols_fit([(ep.S, ep.M) for ep in truths])
    assert abs(oracle.beta1_hat) < 1e-12
    n = m = 10**7
    slopes = []
    for rep in range(200):
        pairs = []
        for trial, sc in enumerate(list(SCEN) * 2):
            est = simulate_trial(sc, n, m, SeedSpec(31337, trial, rep))
            pairs.append((est.S_hat, est.M_hat))
        slopes.append(ols_fit(pairs).beta1_hat)
    assert abs(statistics.fmean(slopes) - oracle.beta1_hat) < 0.02


def test_non_identifiable_and_insufficient():
    with pytest.raises(NonIdentifiableError):
        ols_fit([(1.0, 0.2), (1.0, 0.4), (1.0, 0.9)])
    with pytest.raises(InsufficientDataError):
        ols_fit([(0, 0), (1, 1)])
    with pytest.raises(DomainError):
        ols_fit([(0, 0), (1, 1), (2, 0)], weights=[1, -1, 1])


# --- pearson_ci ---------------------------------------------------------------


def test_pearson_perfect_correlation_boundary():
    r, lo, hi = pearson_ci([(0, 0), (1, 1), (2, 2), (3, 3)])
    assert r == 1.0
    assert hi == 1.0
    assert lo == 1.0  # Fisher transform degenerates at the boundary


def test_pearson_zero_correlation_halfwidth():
    # x symmetric, y an even function of x: r = 0 exactly; half-width at 95%
    # is tanh(z_0.975 / sqrt(7-3)) = 0.753058...
    pairs = [(x, x * x) for x in (-3, -2, -1, 0, 1, 2, 3)]
    r, lo, hi = pearson_ci(pairs, level=0.95)
    assert r == 0.0
    assert hi == pytest.approx(0.753058109366224, abs=1e-9)
    assert lo == pytest.approx(-hi, abs=1e-15)


def test_pearson_sign_flip_mirrors_interval():
    rng = random.Random(3)
    pairs = [(rng.random(), rng.random() + 0.3 * i) for i, _ in enumerate(range(8))]
    r, lo, hi = pearson_ci(pairs)
    rn, lon, hin = pearson_ci([(x, -y) for x, y in pairs])
    assert rn == pytest.approx(-r, abs=1e-15)
    assert lon == pytest.approx(-hi, abs=1e-12)
    assert hin == pytest.approx(-lo, abs=1e-12)


def test_pearson_validation():
    with pytest.raises(InsufficientDataError):
        pearson_ci([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(NonIdentifiableError):
        pearson_ci([(1, 0), (1, 1), (1, 2), (1, 3)])
    with pytest.raises(DomainError):
        pearson_ci([(0, 0), (1, 1), (2, 2), (3, 3)], level=1.5)


def test_ci_contains_point_estimate():
    rng = random.Random(8)
    for _ in range(20):
        pairs = [(rng.random(), rng.random()) for _ in range(6)]
        r, lo, hi = pearson_ci(pairs)
        assert lo <= r <= hi


# --- export shape ---------------------------------------------------------------


def test_fit_summary_shape():
    fit = ols_fit([(0, 0.1), (1, 0.9), (2, 2.2), (3, 2.8)])
    doc = fit_summary(fit)
    assert list(doc) == ["beta0", "beta1", "se", "t", "p", "df", "r", "r_lo", "r_hi", "weighted"]
    assert doc["df"] == 2
    assert doc["weighted"] is False
