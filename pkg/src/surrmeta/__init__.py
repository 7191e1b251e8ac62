"""surrmeta: trial-level estimate uncertainty in surrogate endpoint
meta-regression for cancer screening trials.

Simulation of two-arm screening trials, delta-method asymptotics for the
(late-stage reduction, mortality reduction) estimator pair, meta-analytic
regression with slope tests, and Wald confidence-region sensitivity analysis.
"""

from .asymptotics import (
    EndpointCovariance,
    EndpointGradients,
    JointCovariance,
    PositivityCertificate,
    covariance_summary,
    endpoint_covariance,
    endpoint_gradients,
    joint_covariance,
    marginal_variances,
    positivity_certificate,
)
from .experiments import (
    MetaAnalysis,
    SimulationDesign,
    SimulationSummary,
    TrialSummaryRecord,
    analyze_meta,
    design,
    read_trial_summaries,
    run_simulation,
    table2_report,
)
from .inference import MetaFit, ols_fit, pearson_ci, student_t_sf
from .kernel import BACKEND as KERNEL_BACKEND
from .model import (
    ArmParams,
    EndpointPair,
    JointProbs,
    TrialParams,
    derive_endpoints,
    scenario_table,
    to_joint,
    validate,
)
from .regions import (
    WaldRegion,
    assemble_sigma,
    chi2_quantile_2df,
    ellipse_boundary,
    region_contains,
    wald_region,
)
from .sampling import (
    ArmCounts,
    EndpointEstimate,
    TrialCounts,
    estimate_endpoints,
    sample_arm,
    simulate_trial,
)
from .streams import SeedSpec

__version__ = "0.1.0"

__all__ = [
    "ArmCounts",
    "ArmParams",
    "EndpointCovariance",
    "EndpointEstimate",
    "EndpointGradients",
    "EndpointPair",
    "JointCovariance",
    "JointProbs",
    "KERNEL_BACKEND",
    "MetaAnalysis",
    "MetaFit",
    "PositivityCertificate",
    "SeedSpec",
    "SimulationDesign",
    "SimulationSummary",
    "TrialCounts",
    "TrialParams",
    "TrialSummaryRecord",
    "WaldRegion",
    "analyze_meta",
    "assemble_sigma",
    "chi2_quantile_2df",
    "covariance_summary",
    "derive_endpoints",
    "design",
    "ellipse_boundary",
    "endpoint_covariance",
    "endpoint_gradients",
    "estimate_endpoints",
    "joint_covariance",
    "marginal_variances",
    "ols_fit",
    "pearson_ci",
    "positivity_certificate",
    "read_trial_summaries",
    "region_contains",
    "run_simulation",
    "sample_arm",
    "scenario_table",
    "simulate_trial",
    "student_t_sf",
    "table2_report",
    "to_joint",
    "validate",
    "wald_region",
]
