"""Elliptical (Wald) confidence regions for the endpoint pair of one trial.

A region is the set of (S, M) whose Mahalanobis distance from the estimate,
under the finite-sample covariance (sqrt(n)-scale variances divided by the
control-arm size), stays below the two-degree chi-squared quantile
-2*ln(alpha). The sampling correlation rho is a sensitivity input: it cannot
be recovered from published marginal summaries, so regions are typically
swept over plausible values.
"""

import math
from dataclasses import dataclass

from .errors import DegenerateRegionError, DomainError
from .sampling import EndpointEstimate

#: Event counts below this tag a region as low-count: the normal
#: approximation may miss the nominal coverage level.
LOW_COUNT_THRESHOLD = 20


def chi2_quantile_2df(alpha):
    """(1 - alpha) quantile of chi-squared with 2 df; closed form -2 ln(alpha)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0,1), got {alpha}")
    return -2.0 * math.log(alpha)


def assemble_sigma(var_S, var_M, rho):
    """2x2 covariance from variances and a correlation; PSD by construction."""
    if var_S < 0.0 or var_M < 0.0:
        raise DomainError("variances must be nonnegative")
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must be in [-1,1], got {rho}")
    cov = rho * math.sqrt(var_S * var_M)
    return ((var_S, cov), (cov, var_M))


@dataclass(frozen=True)
class WaldRegion:
    center: tuple  # (S_hat, M_hat)
    shape: tuple  # 2x2 finite-sample covariance, nested tuples
    threshold: float
    alpha: float
    rho_used: float
    low_count: bool = False

    def mahalanobis_sq(self, point):
        (a, b), (_, c) = self.shape
        det = a * c - b * b
        if det <= 0.0 or a <= 0.0:
            raise DegenerateRegionError("region shape matrix is singular")
        dx = point[0] - self.center[0]
        dy = point[1] - self.center[1]
        return (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det

    def area(self):
        (a, b), (_, c) = self.shape
        det = a * c - b * b
        return math.pi * self.threshold * math.sqrt(det)


def wald_region(est: EndpointEstimate, var_S, var_M, rho, alpha) -> WaldRegion:
    """Confidence region centered at a trial's estimate.

    var_S/var_M are sqrt(n)-scale variances; the region divides them by the
    control-arm size. Requires a non-singular shape (positive variances and
    |rho| < 1).
    """
    threshold = chi2_quantile_2df(alpha)
    sigma = assemble_sigma(var_S, var_M, rho)
    if var_S <= 0.0 or var_M <= 0.0 or abs(rho) >= 1.0:
        raise DegenerateRegionError(
            "singular region: need positive variances and |rho| < 1"
        )
    n = est.n
    shape = tuple(tuple(v / n for v in row) for row in sigma)
    counts = (
        est.p_hat_L_C * est.n,
        est.p_hat_L_S * est.m,
        est.p_hat_D_C * est.n,
        est.p_hat_D_S * est.m,
    )
    low = any(round(c) < LOW_COUNT_THRESHOLD for c in counts)
    return WaldRegion(
        center=(est.S_hat, est.M_hat),
        shape=shape,
        threshold=threshold,
        alpha=alpha,
        rho_used=rho,
        low_count=low,
    )


def region_contains(region: WaldRegion, point) -> bool:
    """Strict membership of a point in the region interior."""
    return region.mahalanobis_sq(point) < region.threshold


def ellipse_boundary(region: WaldRegion, k):
    """k equally spaced boundary points, ordered by angle.

    Points are center + sqrt(threshold) * L (cos t, sin t) with L the lower
    Cholesky factor of the shape; each lies at squared Mahalanobis distance
    exactly threshold (to rounding).
    """
    if k < 8:
        raise DomainError(f"need at least 8 boundary points, got {k}")
    (a, b), (_, c) = region.shape
    if a <= 0.0:
        raise DegenerateRegionError("region shape matrix is singular")
    l11 = math.sqrt(a)
    l21 = b / l11
    rest = c - l21 * l21
    if rest <= 0.0:
        raise DegenerateRegionError("region shape matrix is singular")
    l22 = math.sqrt(rest)
    scale = math.sqrt(region.threshold)
    cx, cy = region.center
    pts = []
    for i in range(k):
        theta = 2.0 * math.pi * i / k
        ct = math.cos(theta)
        st = math.sin(theta)
        pts.append((cx + scale * (l11 * ct), cy + scale * (l21 * ct + l22 * st)))
    return pts
