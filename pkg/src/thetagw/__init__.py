"""Branching processes whose iterates stay inside one two-parameter family.

The offspring generating function f solves (A - f(s))^(-theta) =
a (A - s)^(-theta) + c, so every n-step iterate is the same expression with
(a, c) replaced by (a^n, c (a^n - 1)/(a - 1)). The package classifies
parameter sets, evaluates offspring laws and explicit iterates, derives
extinction and explosion time distributions, builds the conditioned
(never-absorbed) chain and a continuous-time embedding, and checks all of it
by simulation.
"""

from .absorption import (
    AbsorptionTails,
    ExpectedAbsorption,
    GumbelEval,
    GumbelLimit,
    absorption_tails,
    conditional_t1_cdf,
    expected_absorption,
    gumbel_limit,
)
from .embedding import (
    Embedding,
    build_embedding,
    h_coeffs,
    h_eval,
    integral_residual,
    semigroup_F,
)
from .errors import (
    ConditioningWarning,
    DomainError,
    InconsistentParamsError,
    NumericError,
    OverflowGuardError,
    QualityWarning,
    RegimeError,
    SingularPathError,
    ThetaGWError,
    TrivialLawError,
    TruncationError,
    UnclassifiableError,
    UnsupportedFormError,
)
from .offspring import (
    INFINITE,
    OffspringTable,
    pmf,
    pmf_oracle,
    sample_offspring,
    theta0_scaled_tail,
)
from .params import (
    CaseTag,
    Criticality,
    ScalarSummary,
    ThetaParams,
    case_of,
    dual_transform,
    from_linear_fractional,
    scalar_summary,
    serialize,
    validate_classify,
)
from .pgf import (
    SeriesTruncation,
    compose_iterate,
    eval_f,
    eval_fn,
    eval_fn_prime,
    fn_series,
    gamma_of,
    series_coeffs,
)
from .qprocess import (
    LawKind,
    LimitLaw,
    QFunction,
    conditional_limit_b,
    critical_limit_w,
    q_function,
    q_transition_gf,
    q_transition_matrix,
    stationary_law,
)
from .simulate import (
    EmpiricalTails,
    KSRecord,
    SimConfig,
    Status,
    TrajectoryRecord,
    estimate_tails,
    ks_distance,
    simulate_ct_skeleton,
    simulate_trajectory,
)
from .verify import CANONICAL_SETS, VerifyCheck, verify_set, verify_suite

__version__ = "0.1.0"

__all__ = [
    "AbsorptionTails",
    "CANONICAL_SETS",
    "CaseTag",
    "ConditioningWarning",
    "Criticality",
    "DomainError",
    "Embedding",
    "EmpiricalTails",
    "ExpectedAbsorption",
    "GumbelEval",
    "GumbelLimit",
    "INFINITE",
    "InconsistentParamsError",
    "KSRecord",
    "LawKind",
    "LimitLaw",
    "NumericError",
    "OffspringTable",
    "OverflowGuardError",
    "QFunction",
    "QualityWarning",
    "RegimeError",
    "ScalarSummary",
    "SeriesTruncation",
    "SimConfig",
    "SingularPathError",
    "Status",
    "ThetaGWError",
    "ThetaParams",
    "TrajectoryRecord",
    "TrivialLawError",
    "TruncationError",
    "UnclassifiableError",
    "UnsupportedFormError",
    "VerifyCheck",
    "absorption_tails",
    "build_embedding",
    "case_of",
    "compose_iterate",
    "conditional_limit_b",
    "conditional_t1_cdf",
    "critical_limit_w",
    "dual_transform",
    "estimate_tails",
    "eval_f",
    "eval_fn",
    "eval_fn_prime",
    "expected_absorption",
    "fn_series",
    "from_linear_fractional",
    "gamma_of",
    "gumbel_limit",
    "h_coeffs",
    "h_eval",
    "integral_residual",
    "ks_distance",
    "pmf",
    "pmf_oracle",
    "q_function",
    "q_transition_gf",
    "q_transition_matrix",
    "sample_offspring",
    "scalar_summary",
    "semigroup_F",
    "serialize",
    "series_coeffs",
    "simulate_ct_skeleton",
    "simulate_trajectory",
    "stationary_law",
    "theta0_scaled_tail",
    "validate_classify",
    "verify_set",
    "verify_suite",
]
