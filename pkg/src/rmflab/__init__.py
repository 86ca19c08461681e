"""Numerical laboratory for Rademacher random multiplicative functions.

The package simulates two models of random multiplicative function driven by
independent +-1 signs on the primes: ``f`` (supported on squarefree integers)
and ``fstar`` (completely multiplicative).  It provides weighted partial sums
M_alpha(x) = sum_{n<=x} g(n)/n^alpha with sign-change detection, truncated
Euler products and zeta-based exponential-formula diagnostics, exact
Mellin-type integrals of the step function M_alpha, and a Monte Carlo driver
with reproducible seeding and CSV/manifest output.
"""

__version__ = "0.1.0"

from .errors import DomainError, MissingSignError, ResourceError
from .primes import SpfTable, build_spf_sieve, factorize, is_squarefree, primes_up_to
from .signs import (
    SignAssignment,
    SignMode,
    MultiplicativeEvaluator,
    load_explicit_signs,
    sign_at_prime,
    trial_seed,
)
from .series import (
    Model,
    SignChangeLog,
    WeightedSumSeries,
    compute_series,
    detect_sign_changes,
    growth_statistic,
    riesz_mean,
)
from .dirichlet import (
    EulerProduct,
    HarperScanResult,
    euler_product_F,
    euler_product_F_star,
    exponential_formula_check,
    harper_sup_statistic,
    prime_cosine_sum,
    prime_sum_real,
    zeta,
)
from .mellin import (
    DivergenceRow,
    MellinEvaluation,
    abs_mellin_integral,
    divergence_comparison,
    evaluate_mellin,
    mellin_step_integral,
    signed_and_absolute_integrals,
    truncated_identity_residual,
)
from .experiments import (
    AggregateStats,
    ExperimentConfig,
    replay_experiment,
    run_experiment,
    write_experiment,
)

__all__ = [
    "DomainError",
    "MissingSignError",
    "ResourceError",
    "SpfTable",
    "build_spf_sieve",
    "primes_up_to",
    "factorize",
    "is_squarefree",
    "SignMode",
    "SignAssignment",
    "MultiplicativeEvaluator",
    "sign_at_prime",
    "load_explicit_signs",
    "trial_seed",
    "Model",
    "WeightedSumSeries",
    "SignChangeLog",
    "compute_series",
    "detect_sign_changes",
    "riesz_mean",
    "growth_statistic",
    "EulerProduct",
    "HarperScanResult",
    "zeta",
    "euler_product_F",
    "euler_product_F_star",
    "prime_cosine_sum",
    "prime_sum_real",
    "exponential_formula_check",
    "harper_sup_statistic",
    "MellinEvaluation",
    "DivergenceRow",
    "mellin_step_integral",
    "abs_mellin_integral",
    "signed_and_absolute_integrals",
    "evaluate_mellin",
    "truncated_identity_residual",
    "divergence_comparison",
    "ExperimentConfig",
    "AggregateStats",
    "run_experiment",
    "write_experiment",
    "replay_experiment",
    "__version__",
]
