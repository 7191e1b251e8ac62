"""Two-arm screening-trial probability model and the scenario registry.

Each arm is parameterized by four conditional probabilities: early- and
late-stage diagnosis, and death given each diagnosis stage. The equivalent
joint parameterization spreads one arm over five (mortality, diagnosis) cells;
the (death, no-diagnosis) cell has probability zero and is not stored. Trial
efficacy is summarized by the endpoint pair

    S = 1 - p_L(screen) / p_L(control)   late-stage incidence reduction
    M = 1 - p_D(screen) / p_D(control)   cancer-mortality reduction

with p_D = p_L * p(D|L) + p_E * p(D|E) per arm.
"""

import json
from dataclasses import dataclass

from .errors import DegenerateDenominatorError, ParameterizationError

SUM_TOL = 1e-12


@dataclass(frozen=True)
class ArmParams:
    """Conditional parameterization of one trial arm."""

    p_E: float
    p_L: float
    p_D_given_E: float
    p_D_given_L: float

    def violations(self, prefix=""):
        out = []
        for name in ("p_E", "p_L", "p_D_given_E", "p_D_given_L"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"{prefix}{name}: probability in [0,1] violated (got {v!r})")
        if self.p_E + self.p_L > 1.0:
            out.append(
                f"{prefix}constraint p_E + p_L <= 1 violated "
                f"(p_E + p_L = {self.p_E + self.p_L!r})"
            )
        return out

    def p_D(self):
        """Marginal cancer-death probability of the arm."""
        return self.p_L * self.p_D_given_L + self.p_E * self.p_D_given_E


@dataclass(frozen=True)
class TrialParams:
    control: ArmParams
    screen: ArmParams
    label: str = ""


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple


def validate(params: TrialParams) -> ValidationResult:
    """Check every model invariant; total function, never raises."""
    out = []
    out.extend(params.control.violations("control."))
    out.extend(params.screen.violations("screen."))
    if not out:
        if params.control.p_L <= 0.0:
            out.append("control.p_L must be > 0 for endpoint derivation")
        if params.control.p_D() <= 0.0:
            out.append("control death probability must be > 0 for endpoint derivation")
    return ValidationResult(ok=not out, violations=tuple(out))


@dataclass(frozen=True)
class JointProbs:
    """Five-cell joint (mortality x diagnosis) distribution of one arm."""

    p00: float  # alive, no diagnosis
    p01: float  # alive, early-stage
    p11: float  # death, early-stage
    p02: float  # alive, late-stage
    p12: float  # death, late-stage

    def __post_init__(self):
        cells = self.as_tuple()
        if any(c < 0.0 or c > 1.0 for c in cells):
            raise ParameterizationError(f"joint cells outside [0,1]: {cells}")
        total = sum(cells)
        if abs(total - 1.0) > SUM_TOL:
            raise ParameterizationError(f"joint cells sum to {total!r}, not 1")

    def as_tuple(self):
        return (self.p00, self.p01, self.p11, self.p02, self.p12)

    def late_mass(self):
        return self.p02 + self.p12

    def death_mass(self):
        return self.p11 + self.p12


def to_joint(arm: ArmParams) -> JointProbs:
    """Map the conditional parameterization of one arm to its joint cells."""
    bad = arm.violations()
    if bad:
        raise ParameterizationError("; ".join(bad))
    p00 = 1.0 - arm.p_E - arm.p_L
    if -SUM_TOL < p00 < 0.0:  # absorb rounding when p_E + p_L == 1
        p00 = 0.0
    return JointProbs(
        p00=p00,
        p01=arm.p_E * (1.0 - arm.p_D_given_E),
        p11=arm.p_E * arm.p_D_given_E,
        p02=arm.p_L * (1.0 - arm.p_D_given_L),
        p12=arm.p_L * arm.p_D_given_L,
    )


@dataclass(frozen=True)
class EndpointPair:
    S: float  # late-stage incidence reduction
    M: float  # mortality reduction


def derive_endpoints(params: TrialParams) -> EndpointPair:
    """True endpoint pair implied by trial parameters.

    Raises DegenerateDenominatorError when the control arm has zero late-stage
    or zero death probability, in which case the ratios are undefined.
    """
    bad = params.control.violations("control.") + params.screen.violations("screen.")
    if bad:
        raise ParameterizationError("; ".join(bad))
    p_L_C = params.control.p_L
    if p_L_C <= 0.0:
        raise DegenerateDenominatorError(
            "control late-stage probability is zero; S undefined", which="late_control"
        )
    p_D_C = params.control.p_D()
    if p_D_C <= 0.0:
        raise DegenerateDenominatorError(
            "control death probability is zero; M undefined", which="deaths_control"
        )
    return EndpointPair(
        S=1.0 - params.screen.p_L / p_L_C,
        M=1.0 - params.screen.p_D() / p_D_C,
    )


# --------------------------------------------------------------------------
# Scenario registry.
#
# The shared control arm and scenarios 1 and 4 are used as printed. For
# scenarios 2 and 3 the printed three-decimal screen parameters do not
# reproduce the printed endpoint columns (1 - 0.017/0.020 = 0.15, not 0.125),
# so the registry's default "reconstructed" variant inverts the endpoint
# columns instead: p_E = 0.0125, p_L = 0.0175, p_D_given_L = 5/7 is the unique
# low-round-number solution, and it reproduces the printed p_D_given_E values
# (0.28, 0.08) exactly. The as-printed parameters remain available under the
# "printed" variant.
# --------------------------------------------------------------------------

_CONTROL = ArmParams(p_E=0.010, p_L=0.020, p_D_given_E=0.10, p_D_given_L=0.750)

_RECONSTRUCTED = (
    TrialParams(_CONTROL, _CONTROL, label="Scenario 1"),
    TrialParams(
        _CONTROL,
        ArmParams(p_E=0.0125, p_L=0.0175, p_D_given_E=0.28, p_D_given_L=5.0 / 7.0),
        label="Scenario 2",
    ),
    TrialParams(
        _CONTROL,
        ArmParams(p_E=0.0125, p_L=0.0175, p_D_given_E=0.08, p_D_given_L=5.0 / 7.0),
        label="Scenario 3",
    ),
    TrialParams(
        _CONTROL,
        ArmParams(p_E=0.010, p_L=0.020, p_D_given_E=0.10, p_D_given_L=0.625),
        label="Scenario 4",
    ),
)

_PRINTED = (
    _RECONSTRUCTED[0],
    TrialParams(
        _CONTROL,
        ArmParams(p_E=0.012, p_L=0.017, p_D_given_E=0.28, p_D_given_L=0.714),
        label="Scenario 2",
    ),
    TrialParams(
        _CONTROL,
        ArmParams(p_E=0.013, p_L=0.017, p_D_given_E=0.08, p_D_given_L=0.714),
        label="Scenario 3",
    ),
    _RECONSTRUCTED[3],
)

_VARIANTS = {"reconstructed": _RECONSTRUCTED, "printed": _PRINTED}


def scenario_table(variant="reconstructed"):
    """The four registry scenarios as a tuple of TrialParams."""
    try:
        return _VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown registry variant: {variant!r}") from None


# --- JSON wire format: array of {label, control:{pE,...}, screen:{...}} ---


def _arm_to_dict(arm):
    return {
        "pE": arm.p_E,
        "pL": arm.p_L,
        "pDgE": arm.p_D_given_E,
        "pDgL": arm.p_D_given_L,
    }


def _arm_from_dict(d):
    return ArmParams(
        p_E=float(d["pE"]),
        p_L=float(d["pL"]),
        p_D_given_E=float(d["pDgE"]),
        p_D_given_L=float(d["pDgL"]),
    )


def trial_to_dict(params: TrialParams) -> dict:
    return {
        "label": params.label,
        "control": _arm_to_dict(params.control),
        "screen": _arm_to_dict(params.screen),
    }


def trial_from_dict(d) -> TrialParams:
    return TrialParams(
        control=_arm_from_dict(d["control"]),
        screen=_arm_from_dict(d["screen"]),
        label=str(d.get("label", "")),
    )


def trials_to_json(trials) -> str:
    return json.dumps([trial_to_dict(t) for t in trials], indent=2, sort_keys=True)


def trials_from_json(text):
    return tuple(trial_from_dict(d) for d in json.loads(text))


def registry_document() -> dict:
    """Both registry variants in wire format; "reconstructed" is the default."""
    return {
        "default": "reconstructed",
        "reconstructed": [trial_to_dict(t) for t in _RECONSTRUCTED],
        "printed": [trial_to_dict(t) for t in _PRINTED],
    }
