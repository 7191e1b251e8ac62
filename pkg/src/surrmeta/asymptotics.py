"""Analytic sampling-distribution machinery for the endpoint estimators.

The estimator pair (S_hat, M_hat), centered at the true endpoints and scaled
by sqrt(n), is asymptotically bivariate normal. Its covariance follows from
the CLT for the joint cell frequencies plus the delta method applied to

    g(p) = (1 - (p02_S + p12_S)/(p02_C + p12_C),
            1 - (p11_S + p12_S)/(p11_C + p12_C))

over the ordered cell vector p = (p11_C, p02_C, p12_C, p11_S, p02_S, p12_S).
All covariances here are in sqrt(n)-standardized units: the finite-sample
variance of M_hat is var_M / n, with the control/screen size ratio n/m
already inside the screen-arm terms.

The off-diagonal admits a closed positivity certificate: whenever death is
more likely after a late-stage than an early-stage diagnosis in both arms,
the sampling correlation of the two estimators is strictly positive.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import DegenerateDenominatorError, DomainError
from .model import ArmParams, JointProbs, TrialParams, to_joint

#: Coordinate order of the joint-cell vector used by every matrix here.
P_ORDER = ("p11_C", "p02_C", "p12_C", "p11_S", "p02_S", "p12_S")


def p_vector(joint_control: JointProbs, joint_screen: JointProbs):
    """Stack the death/late cells of both arms in the canonical order."""
    jc, js = joint_control, joint_screen
    return np.array([jc.p11, jc.p02, jc.p12, js.p11, js.p02, js.p12])


@dataclass(frozen=True)
class JointCovariance:
    """sqrt(n)-scale CLT covariance of the six estimated joint cells."""

    sigma: np.ndarray  # 6x6, block-diagonal over arms
    n_over_m: float


def _arm_block(cells):
    p = np.asarray(cells, dtype=float)
    return np.diag(p) - np.outer(p, p)


def joint_covariance(joint_control, joint_screen, n, m) -> JointCovariance:
    """Block-diagonal covariance: control block p_i(1-p_i)/-p_i p_j, screen
    block the same scaled by n/m, cross-arm blocks exactly zero."""
    if n < 1 or m < 1:
        raise DomainError("arm sizes must be >= 1")
    ratio = n / m
    sigma = np.zeros((6, 6))
    jc, js = joint_control, joint_screen
    sigma[:3, :3] = _arm_block((jc.p11, jc.p02, jc.p12))
    sigma[3:, 3:] = ratio * _arm_block((js.p11, js.p02, js.p12))
    return JointCovariance(sigma=sigma, n_over_m=ratio)


@dataclass(frozen=True)
class EndpointGradients:
    grad_S: np.ndarray
    grad_M: np.ndarray


def endpoint_gradients(p) -> EndpointGradients:
    """Gradients of the endpoint (reduction) map at a joint-cell vector.

    Each gradient has four non-zero entries built from two scalars: the
    control entries share num/den^2 (positive: more control-arm events mean
    a larger reduction) and the screen entries share -1/den, where (num, den)
    are the screen/control marginal masses of the relevant event. Either
    joint sign orientation gives the same covariance sandwich; this one is
    the derivative of the reductions themselves, as finite differences
    confirm.
    """
    p = np.asarray(p, dtype=float)
    late_c = p[1] + p[2]
    death_c = p[0] + p[2]
    if late_c <= 0.0:
        raise DegenerateDenominatorError(
            "control late-stage mass is zero", which="late_control"
        )
    if death_c <= 0.0:
        raise DegenerateDenominatorError(
            "control death mass is zero", which="deaths_control"
        )
    late_s = p[4] + p[5]
    death_s = p[3] + p[5]
    d_control_late = late_s / (late_c * late_c)
    d_screen_late = -1.0 / late_c
    d_control_death = death_s / (death_c * death_c)
    d_screen_death = -1.0 / death_c
    return EndpointGradients(
        grad_S=np.array([0.0, d_control_late, d_control_late, 0.0,
                         d_screen_late, d_screen_late]),
        grad_M=np.array([d_control_death, 0.0, d_control_death,
                         d_screen_death, 0.0, d_screen_death]),
    )


@dataclass(frozen=True)
class EndpointCovariance:
    """Asymptotic (var_S, var_M, rho) of the endpoint estimators.

    `rho` is None when either variance is zero: correlation is then undefined
    by degeneracy, and reporting 0 would silently assert independence.
    """

    var_S: float
    var_M: float
    rho: float  # float | None

    def matrix(self):
        if self.rho is None:
            raise DomainError("correlation undefined by degeneracy; no 2x2 form")
        cov = self.rho * math.sqrt(self.var_S * self.var_M)
        return np.array([[self.var_S, cov], [cov, self.var_M]])


def endpoint_covariance(params: TrialParams, n, m) -> EndpointCovariance:
    """Delta-method covariance of sqrt(n)-standardized (S_hat, M_hat)."""
    jc = to_joint(params.control)
    js = to_joint(params.screen)
    p = p_vector(jc, js)
    grads = endpoint_gradients(p)
    sigma = joint_covariance(jc, js, n, m).sigma
    gmat = np.column_stack([grads.grad_S, grads.grad_M])
    smat = gmat.T @ sigma @ gmat
    var_S = float(smat[0, 0])
    var_M = float(smat[1, 1])
    if var_S <= 0.0 or var_M <= 0.0:
        rho = None
    else:
        rho = float(smat[0, 1]) / math.sqrt(var_S * var_M)
        rho = max(-1.0, min(1.0, rho))
    return EndpointCovariance(var_S=var_S, var_M=var_M, rho=rho)


@dataclass(frozen=True)
class PositivityCertificate:
    """Closed-form certificate that the estimator covariance is positive.

    cov12 = A*rt + B*su*(n/m), where A and B collapse to
    p12*(p00 + p01) - p11*p02 per arm. Under the stage-lethality ordering
    p(D|E) < p(D|L) in both arms, A and B (hence cov12) are strictly positive.
    """

    A: float
    B: float
    rt: float
    su: float
    cov12: float
    assumption_holds: bool


def positivity_certificate(params: TrialParams, n, m) -> PositivityCertificate:
    if n < 1 or m < 1:
        raise DomainError("arm sizes must be >= 1")
    jc = to_joint(params.control)
    js = to_joint(params.screen)
    grads = endpoint_gradients(p_vector(jc, js))
    # rt pairs the control entries of the two gradients, su the screen
    # entries; both products are orientation-free and positive
    rt = float(grads.grad_S[1]) * float(grads.grad_M[0])
    su = float(grads.grad_S[4]) * float(grads.grad_M[3])
    a_term = jc.p12 * jc.p01 + jc.p12 * jc.p00 - jc.p11 * jc.p02
    b_term = js.p12 * js.p01 + js.p12 * js.p00 - js.p11 * js.p02
    cov12 = a_term * rt + b_term * su * (n / m)
    holds = (
        params.control.p_D_given_E < params.control.p_D_given_L
        and params.screen.p_D_given_E < params.screen.p_D_given_L
    )
    return PositivityCertificate(
        A=a_term, B=b_term, rt=rt, su=su, cov12=cov12, assumption_holds=holds
    )


def marginal_variances(p_L_C, p_L_S, p_D_C, p_D_S, n, m):
    """sqrt(n)-scale variances of S_hat and M_hat from marginal rates only.

    Delta method for the two-independent-proportions ratio 1 - num/den:
    the den (control) term carries num^2/den^4 and the num (screen) term
    carries (n/m)/den^2. These equal the diagonal of the full joint-cell
    covariance, but need nothing beyond the published marginal rates.
    """
    if n < 1 or m < 1:
        raise DomainError("arm sizes must be >= 1")
    if p_L_C <= 0.0:
        raise DegenerateDenominatorError(
            "control late-stage rate is zero", which="late_control"
        )
    if p_D_C <= 0.0:
        raise DegenerateDenominatorError(
            "control death rate is zero", which="deaths_control"
        )
    ratio = n / m
    var_S = (p_L_S * p_L_S) / (p_L_C ** 4) * (p_L_C * (1.0 - p_L_C)) + ratio / (
        p_L_C * p_L_C
    ) * (p_L_S * (1.0 - p_L_S))
    var_M = (p_D_S * p_D_S) / (p_D_C ** 4) * (p_D_C * (1.0 - p_D_C)) + ratio / (
        p_D_C * p_D_C
    ) * (p_D_S * (1.0 - p_D_S))
    return var_S, var_M


def covariance_summary(label, params: TrialParams, n, m) -> dict:
    """JSON-ready covariance/certificate summary for one trial."""
    cov = endpoint_covariance(params, n, m)
    cert = positivity_certificate(params, n, m)
    return {
        "label": label,
        "varS": cov.var_S,
        "varM": cov.var_M,
        "rho": cov.rho,
        "A": cert.A,
        "B": cert.B,
        "cov12": cert.cov12,
        "assumptionHolds": cert.assumption_holds,
    }


def random_trial_params(stream: streams.UnitStream, ordered=True, label="") -> TrialParams:
    """Random valid trial parameters for certificate and property checks.

    Incidence probabilities are uniform on (0.001, 0.1) with p_E + p_L < 0.15,
    covering realistic screening rates while keeping denominators positive.
    Death-given-stage probabilities are uniform on (0, 1) restricted to the
    stage-lethality ordering (or its deliberate violation when ordered=False).
    """

    def draw_arm():
        while True:
            p_e = 0.001 + 0.099 * stream.next_float()
            p_l = 0.001 + 0.099 * stream.next_float()
            if p_e + p_l < 0.15:
                break
        while True:
            d_e = stream.next_float()
            d_l = stream.next_float()
            if d_e <= 0.0 or d_l <= 0.0:
                continue
            if ordered and d_e < d_l:
                break
            if not ordered and d_e > d_l:
                break
        return ArmParams(p_E=p_e, p_L=p_l, p_D_given_E=d_e, p_D_given_L=d_l)

    return TrialParams(control=draw_arm(), screen=draw_arm(), label=label)
