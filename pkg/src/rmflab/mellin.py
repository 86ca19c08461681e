"""Exact Mellin-type integrals of the step function M_alpha.

Because M_alpha is constant on each [n, n+1), the integral

    (s - alpha) * integral_1^N M_alpha(x) x^-(s+1-alpha) dx

collapses to the finite sum  sum_{n=1}^{N-1} M_alpha(n) (n^-(s-alpha) -
(n+1)^-(s-alpha)): every interval integral has a closed form, so there is no
quadrature error, only rounding.  Partial summation then makes the truncation
exact:

    sum_{n<=N} g(n) n^-s  =  (that sum)  +  M_alpha(N) N^-(s-alpha),

an algebraic identity whose numerical residual is pure rounding.  The
absolute-value companion integral uses the same per-interval weights against
|M_alpha(n)| and is reported without the (s-alpha) prefactor.

The infinite upper limit is never extrapolated: truncation at N plus the
exact boundary term is the whole story at desk scale, and the comparison
table tracks how the signed and absolute integrals separate as sigma
decreases toward 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .output import fmt_float
from .primes import SpfTable, build_spf_sieve
from .series import Model, WeightedSumSeries, compute_series
from .signs import MultiplicativeEvaluator, SignAssignment, SignMode
from . import dirichlet


@dataclass(frozen=True)
class MellinEvaluation:
    """One evaluation of the truncated identity at a point s.

    signed_integral + boundary_term equals the truncated Dirichlet sum up to
    rounding; abs_integral (real s only, else None) dominates
    |signed_integral| / (s - alpha) by the triangle inequality.
    """

    s: complex
    alpha: float
    limit: int
    signed_integral: complex
    boundary_term: complex
    abs_integral: float | None


def _interval_weights(limit: int, exponent: complex) -> np.ndarray:
    """w_n = n^-e - (n+1)^-e for n = 1..N-1: (e) times the per-interval
    integrals of x^-(e+1), in closed form."""
    n = np.arange(1, limit + 1, dtype=np.float64)
    powers = n ** (-exponent)
    return powers[:-1] - powers[1:]


def mellin_step_integral(series: WeightedSumSeries, s: complex) -> complex:
    """(s - alpha) * integral_1^N M_alpha(x) x^-(s+1-alpha) dx, exactly.

    Requires Re s > alpha so each closed-form interval integral is finite.
    """
    s = complex(s)
    if s.real <= series.alpha:
        raise DomainError(
            f"divergent kernel: need Re s > alpha, got Re s = {s.real}, alpha = {series.alpha}"
        )
    if series.limit < 2:
        return 0j
    w = _interval_weights(series.limit, s - series.alpha)
    return complex(np.sum(series.values[1 : series.limit] * w))


def boundary_term(series: WeightedSumSeries, s: complex) -> complex:
    """M_alpha(N) N^-(s-alpha), the exact partial-summation boundary term."""
    s = complex(s)
    n = float(series.limit)
    return complex(series.values[series.limit] * n ** (-(s - series.alpha)))


def signed_and_absolute_integrals(series: WeightedSumSeries, sigma: float) -> tuple[float, float]:
    """(integral of M_alpha, integral of |M_alpha|) against x^-(sigma+1-alpha).

    Both are reported without the (sigma - alpha) prefactor and are summed
    over the identical per-interval products, so absolute >= |signed| holds
    exactly in floating point (rounding is monotone), not just up to error.
    """
    sigma = float(sigma)
    if sigma <= series.alpha:
        raise DomainError(
            f"divergent kernel: need sigma > alpha, got sigma = {sigma}, alpha = {series.alpha}"
        )
    if series.limit < 2:
        return 0.0, 0.0
    w = _interval_weights(series.limit, sigma - series.alpha) / (sigma - series.alpha)
    v = series.values[1 : series.limit] * w
    return float(np.sum(v)), float(np.sum(np.abs(v)))


def abs_mellin_integral(series: WeightedSumSeries, sigma: float) -> float:
    """integral_1^N |M_alpha(x)| x^-(sigma+1-alpha) dx at real sigma > alpha.

    Reported without the (s - alpha) prefactor; every per-interval weight is
    positive, so this dominates |signed integral| / (sigma - alpha).
    """
    return signed_and_absolute_integrals(series, sigma)[1]


def evaluate_mellin(series: WeightedSumSeries, s: complex) -> MellinEvaluation:
    """Signed integral, boundary term, and (real s) absolute integral at s."""
    s = complex(s)
    signed = mellin_step_integral(series, s)
    bnd = boundary_term(series, s)
    absint = abs_mellin_integral(series, s.real) if s.imag == 0.0 else None
    return MellinEvaluation(
        s=s,
        alpha=series.alpha,
        limit=series.limit,
        signed_integral=signed,
        boundary_term=bnd,
        abs_integral=absint,
    )


def truncated_identity_residual(
    assignment: SignAssignment,
    model: Model | str,
    alpha: float,
    s: complex,
    limit: int,
    table: SpfTable | None = None,
) -> float:
    """| sum_{n<=N} g(n) n^-s  -  (signed integral + boundary term) |.

    An algebraic identity for the truncation: the residual is pure rounding,
    below 1e-9 relative to |sum| + 1 at desk scale.
    """
    model = Model(model)
    s = complex(s)
    if table is None:
        table = build_spf_sieve(max(limit, 2))
    series = compute_series(assignment, model, alpha, limit, table)
    evaluator = MultiplicativeEvaluator(assignment, table)
    g = evaluator.values_up_to(limit, model.value).astype(np.float64)[1:]
    n = np.arange(1, limit + 1, dtype=np.float64)
    dirichlet_sum = complex(np.sum(g * n ** (-s)))
    rhs = mellin_step_integral(series, s) + boundary_term(series, s)
    return float(abs(dirichlet_sum - rhs))


@dataclass(frozen=True)
class DivergenceRow:
    """One sigma row of the signed/absolute/witness comparison table."""

    sigma: float
    signed: float
    absolute: float
    harper_witness: float
    limit: int
    prime_limit: int
    seed: int


def divergence_comparison(
    assignment: SignAssignment,
    model: Model | str,
    alpha: float,
    sigma_grid: list[float],
    limit: int,
    prime_limit: int,
    table: SpfTable | None = None,
    grid_step: float | None = None,
) -> list[DivergenceRow]:
    """Signed vs absolute integral with a sup-scan witness, per sigma.

    For each sigma (sorted decreasing toward 1/2): signed is the integral
    without prefactor (mellin_step_integral / (sigma - alpha)); absolute is
    abs_mellin_integral; the witness is |G(sigma + i t*)| / t* for the
    model's truncated Euler product G, with t* from the sup scan at the same
    prime_limit.  One fixed assignment is used across the whole grid: mixing
    realizations across sigma would destroy the phenomenon being compared.
    """
    model = Model(model)
    grid = [float(x) for x in sigma_grid]
    if not grid:
        raise DomainError("sigma_grid must be nonempty")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise DomainError("sigma_grid must be sorted strictly decreasing")
    low = max(alpha, 0.5)
    for sig in grid:
        if not low < sig <= 0.7:
            raise DomainError(f"sigma_grid entries must lie in ({low}, 0.7], got {sig}")
        if sig > 0.6:
            raise DomainError(
                f"sigma={sig}: the sup-scan witness is only defined for sigma <= 0.6"
            )
    if table is None:
        table = build_spf_sieve(max(limit, prime_limit, 2))
    series = compute_series(assignment, model, alpha, limit, table)
    product = dirichlet.euler_product_F if model is Model.F else dirichlet.euler_product_F_star
    seed = assignment.seed if assignment.mode is SignMode.IID_RADEMACHER else 0
    rows = []
    for sig in grid:
        signed, absolute = signed_and_absolute_integrals(series, sig)
        scan = dirichlet.harper_sup_statistic(assignment, sig, grid_step, prime_limit, table)
        witness_value = product(assignment, complex(sig, scan.t_star), prime_limit, table)
        rows.append(
            DivergenceRow(
                sigma=sig,
                signed=signed,
                absolute=absolute,
                harper_witness=float(abs(witness_value.value)) / scan.t_star,
                limit=limit,
                prime_limit=prime_limit,
                seed=seed,
            )
        )
    return rows


def comparison_csv(rows: list[DivergenceRow]) -> str:
    """CSV text of a comparison table."""
    lines = ["sigma,signed,absolute,harper_witness,N,prime_limit,seed"]
    for r in rows:
        lines.append(
            ",".join(
                [
                    fmt_float(r.sigma),
                    fmt_float(r.signed),
                    fmt_float(r.absolute),
                    fmt_float(r.harper_witness),
                    str(r.limit),
                    str(r.prime_limit),
                    str(r.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"
