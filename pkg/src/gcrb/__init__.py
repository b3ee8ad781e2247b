"""Generalized Cramer-Rao bound diagnostics for Bayesian phase estimation.

The package simulates (or ingests) four-setting two-photon interferometry
data, reconstructs grid posteriors, computes absolute central moments and
generalized Fisher informations, and measures how often each order-beta lower
bound is broken, which flags miscalibration bias in the sensor model.
"""

__version__ = "0.1.0"

from .bayes import (
    DEFAULT_DOMAIN,
    MomentSet,
    PhaseDomain,
    PosteriorGrid,
    SaturationReport,
    absolute_moment,
    estimate,
    gaussian_abs_moment,
    gaussianity_ratios,
    kappa,
    moment_set,
    posterior,
    saturation_report,
)
from .errors import (
    CountsParseError,
    DegeneratePosteriorError,
    EstimationError,
    InfeasibleDataError,
    SingularScoreError,
    UndefinedRatioError,
)
from .fisher import (
    BoundValue,
    OrderPair,
    conjugate_exponent,
    crb_bound,
    fisher,
    generalized_fisher,
)
from .ingest import (
    CalibrationRecord,
    CountsRecord,
    fold_phase,
    parse_counts,
    to_tally,
    write_counts,
)
from .model import (
    MODELS,
    NOON2,
    SETTINGS,
    LikelihoodModel,
    ModelParams,
    Noon2Model,
    OutcomeTally,
    Setting,
    get_model,
    log_likelihood,
    outcome_prob,
    outcome_probs,
    score,
)
from .montecarlo import (
    CampaignConfig,
    ExperimentRecord,
    ViolationStats,
    empirical_bias,
    experiment_rng,
    run_campaign,
    run_experiment,
    sample_tally,
    sigma_beta,
    violation_fractions,
)

__all__ = [
    "__version__",
    "BoundValue",
    "CalibrationRecord",
    "CampaignConfig",
    "CountsParseError",
    "CountsRecord",
    "DEFAULT_DOMAIN",
    "DegeneratePosteriorError",
    "EstimationError",
    "ExperimentRecord",
    "InfeasibleDataError",
    "LikelihoodModel",
    "MODELS",
    "ModelParams",
    "MomentSet",
    "NOON2",
    "Noon2Model",
    "OrderPair",
    "OutcomeTally",
    "PhaseDomain",
    "PosteriorGrid",
    "SETTINGS",
    "SaturationReport",
    "Setting",
    "SingularScoreError",
    "UndefinedRatioError",
    "ViolationStats",
    "absolute_moment",
    "conjugate_exponent",
    "crb_bound",
    "empirical_bias",
    "estimate",
    "experiment_rng",
    "fisher",
    "fold_phase",
    "gaussian_abs_moment",
    "gaussianity_ratios",
    "generalized_fisher",
    "get_model",
    "kappa",
    "log_likelihood",
    "moment_set",
    "outcome_prob",
    "outcome_probs",
    "parse_counts",
    "posterior",
    "run_campaign",
    "run_experiment",
    "sample_tally",
    "saturation_report",
    "score",
    "sigma_beta",
    "to_tally",
    "violation_fractions",
    "write_counts",
]
