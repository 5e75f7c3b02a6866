"""Complex matrix-variate Dirichlet measures, closed-form averages, and
Monte Carlo verification."""

from .averages import (
    AverageResult,
    AverageSpec,
    FunctionalSpec,
    complement_power_average,
    det_power_average,
    evaluate_average,
    exp_trace_average,
    hermitian_form_moment,
    normalizer_ln,
    phi6_average,
)
from .errors import (
    BadSupport,
    BadWeights,
    DomainError,
    MvdaError,
    NoConvergence,
    NonFiniteIntegrand,
    NotPositiveDefinite,
    PochhammerPole,
    SamplerError,
)
from .linalg import (
    HermitianMatrix,
    LowerTriangularFactor,
    cholesky,
    eigvals_hermitian,
    inv_sqrt,
    is_pd,
    logdet_abs,
)
from .measures import (
    DirichletSample,
    MeasureSpec,
    sample_batch,
    sample_matrix_gamma,
    sample_rect_p1,
    sample_type1,
    sample_type2,
)
from .montecarlo import (
    McConfig,
    McReport,
    VerifyCase,
    build_report,
    default_suite,
    mc_estimate,
    report_emit,
    verify_suite,
)
from .rng import CounterRng, SeedSpec
from .special import (
    Hyp1F1Result,
    Partition,
    TruncationPolicy,
    gamma_p_ln,
    hyp1f1_matrix,
    partitions_of,
    pochhammer_gen,
    power_mean,
    schur_eval,
    syt_count,
    zonal_c,
    zonal_from_eigs,
)

__version__ = "0.1.0"

__all__ = [
    "AverageResult",
    "AverageSpec",
    "BadSupport",
    "BadWeights",
    "CounterRng",
    "DirichletSample",
    "DomainError",
    "FunctionalSpec",
    "HermitianMatrix",
    "Hyp1F1Result",
    "LowerTriangularFactor",
    "McConfig",
    "McReport",
    "MeasureSpec",
    "MvdaError",
    "NoConvergence",
    "NonFiniteIntegrand",
    "NotPositiveDefinite",
    "Partition",
    "PochhammerPole",
    "SamplerError",
    "SeedSpec",
    "TruncationPolicy",
    "VerifyCase",
    "build_report",
    "cholesky",
    "complement_power_average",
    "default_suite",
    "det_power_average",
    "eigvals_hermitian",
    "evaluate_average",
    "exp_trace_average",
    "gamma_p_ln",
    "hermitian_form_moment",
    "hyp1f1_matrix",
    "inv_sqrt",
    "is_pd",
    "logdet_abs",
    "mc_estimate",
    "normalizer_ln",
    "partitions_of",
    "phi6_average",
    "pochhammer_gen",
    "power_mean",
    "report_emit",
    "sample_batch",
    "sample_matrix_gamma",
    "sample_rect_p1",
    "sample_type1",
    "sample_type2",
    "schur_eval",
    "syt_count",
    "verify_suite",
    "zonal_c",
    "zonal_from_eigs",
]
