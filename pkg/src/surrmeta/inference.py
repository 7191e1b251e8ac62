"""Meta-analytic regression: OLS of mortality reduction on late-stage
incidence reduction, slope t-test, and Pearson correlation intervals.

The same fit serves two roles: applied to true trial parameters it is the
infeasible oracle regression; applied to per-trial estimates it is the
practical fit whose slope inherits the estimators' sampling correlation.
"""

import math
from dataclasses import dataclass

from scipy.special import betainc, ndtri

from .errors import DomainError, InsufficientDataError, NonIdentifiableError


@dataclass(frozen=True)
class MetaFit:
    beta0_hat: float
    beta1_hat: float
    se_beta1: float
    t_stat: float
    p_value: float
    df: int
    r_pearson: float
    r_ci: tuple  # (lo, hi) | None when not computable
    residuals: tuple
    weighted: bool


def student_t_sf(t, df):
    """Upper-tail probability of Student's t via the regularized incomplete
    beta function; absolute error below 1e-10."""
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(0.5 * df, 0.5, x))
    return tail if t >= 0 else 1.0 - tail


def _fisher_interval(r, n, level):
    # Fisher z interval; degenerate at |r| = 1 where the transform diverges.
    if abs(r) >= 1.0:
        return (r, r)
    z = math.atanh(r)
    half = ndtri(0.5 * (1.0 + level)) / math.sqrt(n - 3)
    return (math.tanh(z - half), math.tanh(z + half))


def pearson_ci(pairs, level=0.95):
    """Sample correlation with a Fisher z confidence interval."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0,1), got {level}")
    pairs = list(pairs)
    n = len(pairs)
    if n < 4:
        raise InsufficientDataError(f"need >= 4 pairs for a correlation CI, got {n}")
    xs = [float(x) for x, _ in pairs]
    ys = [float(y) for _, y in pairs]
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    syy = math.fsum((y - ybar) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise NonIdentifiableError("correlation undefined: a variable is constant")
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    lo, hi = _fisher_interval(r, n, level)
    return r, lo, hi


def ols_fit(pairs, weights=None, ci_level=0.95) -> MetaFit:
    """Least-squares fit of y on x with a two-sided slope test.

    `weights`, when given, are positive per-trial weights, normalized to sum
    to the number of trials so the usual standard-error formulas apply
    unchanged. A predictor with no variation is rejected outright: such
    trials carry no information about the slope, and a pseudo-inverse answer
    would hide exactly the failure mode this fit exists to expose.
    """
    pairs = list(pairs)
    n = len(pairs)
    if n < 3:
        raise InsufficientDataError(f"need >= 3 pairs to fit, got {n}")
    xs = [float(x) for x, _ in pairs]
    ys = [float(y) for _, y in pairs]
    if max(xs) == min(xs):
        raise NonIdentifiableError(
            "slope not identifiable: no variation in the surrogate values; "
            "the trials are non-informative for the endpoint relationship"
        )
    if weights is None:
        ws = [1.0] * n
        weighted = False
    else:
        ws = [float(w) for w in weights]
        if len(ws) != n:
            raise DomainError("weights length must match pairs")
        if any(w <= 0 for w in ws):
            raise DomainError("weights must be positive")
        total = math.fsum(ws)
        ws = [w * n / total for w in ws]
        weighted = True

    wsum = math.fsum(ws)
    xbar = math.fsum(w * x for w, x in zip(ws, xs)) / wsum
    ybar = math.fsum(w * y for w, y in zip(ws, ys)) / wsum
    sxx = math.fsum(w * (x - xbar) ** 2 for w, x in zip(ws, xs))
    sxy = math.fsum(w * (x - xbar) * (y - ybar) for w, x, y in zip(ws, xs, ys))
    syy = math.fsum(w * (y - ybar) ** 2 for w, y in zip(ws, ys))

    beta1 = sxy / sxx
    beta0 = ybar - beta1 * xbar
    residuals = tuple(y - beta0 - beta1 * x for x, y in zip(xs, ys))
    df = n - 2
    rss = math.fsum(w * e * e for w, e in zip(ws, residuals))
    sigma2 = rss / df
    se_beta1 = math.sqrt(sigma2 / sxx)

    if se_beta1 > 0.0:
        t_stat = beta1 / se_beta1
    elif beta1 != 0.0:
        t_stat = math.copysign(math.inf, beta1)
    else:
        t_stat = math.nan
    p_value = 2.0 * student_t_sf(abs(t_stat), df)

    if syy > 0.0:
        r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
        r_ci = _fisher_interval(r, n, ci_level) if n >= 4 else None
    else:
        r = math.nan
        r_ci = None

    return MetaFit(
        beta0_hat=beta0,
        beta1_hat=beta1,
        se_beta1=se_beta1,
        t_stat=t_stat,
        p_value=p_value,
        df=df,
        r_pearson=r,
        r_ci=r_ci,
        residuals=residuals,
        weighted=weighted,
    )


def fit_summary(fit: MetaFit) -> dict:
    """Flat export shape shared by the JSON and one-row CSV emitters."""
    lo, hi = fit.r_ci if fit.r_ci is not None else (math.nan, math.nan)
    return {
        "beta0": fit.beta0_hat,
        "beta1": fit.beta1_hat,
        "se": fit.se_beta1,
        "t": fit.t_stat,
        "p": fit.p_value,
        "df": fit.df,
        "r": fit.r_pearson,
        "r_lo": lo,
        "r_hi": hi,
        "weighted": fit.weighted,
    }
