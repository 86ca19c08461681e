"""Zeta values, truncated random Euler products, and prime cosine sums.

The Dirichlet series of f and fstar factor over primes for Re s > 1/2 as

    F(s)     = prod_p (1 + f(p)/p^s),
    Fstar(s) = prod_p (1 - f(p)/p^s)^(-1),

and taking logarithms factorwise gives the exponential formulas

    log F(s)     = sum_p f(p)/p^s - (1/2) log zeta(2s) + bounded term,
    log Fstar(s) = sum_p f(p)/p^s + (1/2) log zeta(2s) + bounded term.

Everything here replaces the infinite products/sums by truncations at a
prime limit P; callers must carry P in their outputs, and each product
reports |last factor - 1| as a Cauchy-style convergence diagnostic.

The sup statistic scans t over the window [1, 2 (log(1/(sigma-1/2)))^2] for
the largest value of sum_p f(p) cos(t log p) / p^sigma on a uniform grid.
A uniform grid with recorded step gives a certified lower bound on the sup,
which is the direction the comparison in the mellin module needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .output import fmt_float
from .primes import SpfTable, build_spf_sieve, primes_up_to
from .signs import SignAssignment, prime_sign_table

# ---------------------------------------------------------------------------
# Riemann zeta via Euler-Maclaurin
# ---------------------------------------------------------------------------

_EM_TERMS = 14


def _bernoulli_over_factorial(k_max: int) -> list[float]:
    """B_{2k}/(2k)! for k = 1..k_max, computed exactly then rounded once."""
    m_max = 2 * k_max
    bern = [Fraction(0)] * (m_max + 1)
    bern[0] = Fraction(1)
    for m in range(1, m_max + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * bern[j]
        bern[m] = -acc / (m + 1)
    return [float(bern[2 * k] / Fraction(math.factorial(2 * k))) for k in range(1, k_max + 1)]


_B2K_OVER_FACT = _bernoulli_over_factorial(_EM_TERMS)


def zeta(s: complex) -> complex:
    """zeta(s) for Re s > 0, s != 1, by Euler-Maclaurin summation.

    sum_{n<N} n^-s  +  N^(1-s)/(s-1)  +  N^-s/2  +  Bernoulli corrections,
    with N growing linearly in |Im s|.  Absolute error is below 1e-10
    throughout Re s >= 0.5 + 1e-3, |Im s| <= 100 (the rectangle the rest of
    the package uses), with large margin.
    """
    s = complex(s)
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    if s.real <= 0.0:
        raise DomainError(f"zeta evaluation requires Re s > 0, got {s}")
    n_cut = 48 + int(math.ceil(abs(s.imag) / 2.0))
    n = np.arange(1, n_cut, dtype=np.float64)
    value = complex(np.sum(n ** (-s)))
    value += n_cut ** (1 - s) / (s - 1) + 0.5 * n_cut ** (-s)
    poch = s
    scale = n_cut ** (-s - 1)
    for k in range(_EM_TERMS):
        value += _B2K_OVER_FACT[k] * poch * scale
        poch *= (s + 2 * k + 1) * (s + 2 * k + 2)
        scale /= n_cut * n_cut
    return value


# ---------------------------------------------------------------------------
# Truncated Euler products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EulerProduct:
    """A truncated Euler product value with its convergence diagnostic."""

    value: complex
    last_factor_deviation: float
    prime_limit: int


def _product_factors(
    assignment: SignAssignment,
    s: complex,
    prime_limit: int,
    table: SpfTable | None,
) -> np.ndarray:
    if complex(s).real <= 0.5:
        raise DomainError(f"Euler products require Re s > 1/2, got {s}")
    if prime_limit < 2:
        raise DomainError(f"prime_limit must be >= 2, got {prime_limit}")
    if table is None:
        table = build_spf_sieve(prime_limit)
    primes = primes_up_to(table)
    primes = primes[primes <= prime_limit]
    signs = prime_sign_table(assignment, primes).astype(np.float64)
    return signs * np.exp(-complex(s) * np.log(primes.astype(np.float64)))


def euler_product_F(
    assignment: SignAssignment,
    s: complex,
    prime_limit: int,
    table: SpfTable | None = None,
) -> EulerProduct:
    """prod_{p <= prime_limit} (1 + f(p)/p^s), factors multiplied in
    ascending p."""
    x = _product_factors(assignment, s, prime_limit, table)
    factors = 1.0 + x
    value = complex(np.multiply.accumulate(factors)[-1])
    return EulerProduct(
        value=value,
        last_factor_deviation=float(abs(factors[-1] - 1.0)),
        prime_limit=prime_limit,
    )


def euler_product_F_star(
    assignment: SignAssignment,
    s: complex,
    prime_limit: int,
    table: SpfTable | None = None,
) -> EulerProduct:
    """prod_{p <= prime_limit} (1 - f(p)/p^s)^(-1), ascending p.

    Each factor needs |f(p)/p^s| < 1, which holds automatically for p >= 2
    and Re s > 1/2.
    """
    x = _product_factors(assignment, s, prime_limit, table)
    factors = 1.0 / (1.0 - x)
    value = complex(np.multiply.accumulate(factors)[-1])
    return EulerProduct(
        value=value,
        last_factor_deviation=float(abs(factors[-1] - 1.0)),
        prime_limit=prime_limit,
    )


# ---------------------------------------------------------------------------
# Prime sums
# ---------------------------------------------------------------------------


def _prime_weights(
    assignment: SignAssignment,
    sigma: float,
    prime_limit: int,
    table: SpfTable | None,
) -> tuple[np.ndarray, np.ndarray]:
    """(f(p) * p^-sigma, log p) over primes p <= prime_limit."""
    if sigma <= 0.5:
        raise DomainError(f"prime sums require sigma > 1/2, got {sigma}")
    if prime_limit < 2:
        raise DomainError(f"prime_limit must be >= 2, got {prime_limit}")
    if table is None:
        table = build_spf_sieve(prime_limit)
    primes = primes_up_to(table)
    primes = primes[primes <= prime_limit].astype(np.float64)
    signs = prime_sign_table(assignment, primes.astype(np.int64)).astype(np.float64)
    return signs * primes ** (-float(sigma)), np.log(primes)


def prime_cosine_sum(
    assignment: SignAssignment,
    sigma: float,
    t: float,
    prime_limit: int,
    table: SpfTable | None = None,
) -> float:
    """sum_{p <= prime_limit} f(p) cos(t log p) p^-sigma, accumulated in
    ascending p."""
    weights, logp = _prime_weights(assignment, sigma, prime_limit, table)
    return float(np.cumsum(weights * np.cos(float(t) * logp))[-1])


def prime_sum_real(
    assignment: SignAssignment,
    sigma: float,
    prime_limit: int,
    table: SpfTable | None = None,
) -> float:
    """sum_{p <= prime_limit} f(p) p^-sigma (the cosine sum at t = 0)."""
    return prime_cosine_sum(assignment, sigma, 0.0, prime_limit, table)


# ---------------------------------------------------------------------------
# Exponential formula residual
# ---------------------------------------------------------------------------


def exponential_formula_check(
    assignment: SignAssignment,
    s: complex,
    prime_limit: int,
    model: str,
    table: SpfTable | None = None,
) -> float:
    """|log of the truncated product - (sum_p f(p)p^-s -/+ (1/2) log zeta(2s))|.

    The minus sign applies to model 'f', the plus sign to model 'fstar'.
    Logs are principal, taken factor by factor; the residual realizes the
    bounded analytic term of the exponential formulas numerically and stays
    <= 2 over the package's validation grid (Re s >= 0.51).
    """
    s = complex(s)
    if s.real < 0.51:
        raise DomainError(f"exponential formula check requires Re s >= 0.51, got {s}")
    if prime_limit < 10**3:
        raise DomainError(f"prime_limit must be >= 10^3, got {prime_limit}")
    model_value = getattr(model, "value", model)
    if model_value not in ("f", "fstar"):
        raise DomainError(f"model must be 'f' or 'fstar', got {model!r}")
    x = _product_factors(assignment, s, prime_limit, table)
    if model_value == "f":
        log_product = complex(np.cumsum(np.log(1.0 + x))[-1])
        half_log_zeta = -0.5 * np.log(complex(zeta(2 * s)))
    else:
        log_product = complex(-np.cumsum(np.log(1.0 - x))[-1])
        half_log_zeta = +0.5 * np.log(complex(zeta(2 * s)))
    prime_sum = complex(np.cumsum(x)[-1])
    return float(abs(log_product - (prime_sum + half_log_zeta)))


# ---------------------------------------------------------------------------
# Sup statistic over the t-window
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarperScanResult:
    """Largest grid value of the prime cosine sum over the t-window.

    t_star is the smallest grid point attaining the maximum; centered_value
    subtracts 2 log log(1/(sigma-1/2)), the centering under which large
    values force the absolute Mellin integral to dominate the signed one.
    """

    sigma: float
    t_star: float
    sup_value: float
    centered_value: float
    grid_step: float
    prime_limit: int


def harper_window(sigma: float) -> float:
    """Right endpoint 2 (log(1/(sigma-1/2)))^2 of the scan window [1, T]."""
    return 2.0 * math.log(1.0 / (sigma - 0.5)) ** 2


def default_grid_step(sigma: float) -> float:
    """Default scan spacing 0.01 / log(1/(sigma-1/2))."""
    return 0.01 / math.log(1.0 / (sigma - 0.5))


def scan_grid_max(
    weights: np.ndarray,
    logp: np.ndarray,
    t_start: float,
    grid_step: float,
    n_points: int,
    chunk: int = 256,
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise maximum of sum_p w_p cos(t log p) over t = t_start + j*step.

    weights has one row per realization; returns (max values, argmax t) with
    ties broken by the smallest t (first occurrence).  Grid points are
    evaluated chunkwise in ascending t with a running strict-max reduction,
    so the result does not depend on chunking.
    """
    weights = np.atleast_2d(weights)
    n_rows = weights.shape[0]
    best = np.full(n_rows, -np.inf)
    best_t = np.full(n_rows, t_start)
    for start in range(0, n_points, chunk):
        stop = min(start + chunk, n_points)
        t_block = t_start + grid_step * np.arange(start, stop, dtype=np.float64)
        phases = np.outer(t_block, logp)
        np.cos(phases, out=phases)
        vals = weights @ phases.T
        block_best = vals.max(axis=1)
        block_arg = vals.argmax(axis=1)
        update = block_best > best
        best[update] = block_best[update]
        best_t[update] = t_block[block_arg[update]]
    return best, best_t


def harper_sup_statistic(
    assignment: SignAssignment,
    sigma: float,
    grid_step: float | None = None,
    prime_limit: int = 10**6,
    table: SpfTable | None = None,
) -> HarperScanResult:
    """Grid supremum of the prime cosine sum over t in [1, 2 log(1/(sigma-1/2))^2].

    Requires 1/2 < sigma <= 0.6 (the window is then nonempty).  The returned
    sup_value is a certified lower bound for the true supremum at the
    recorded grid_step; halving grid_step can only increase it.
    """
    if not 0.5 < sigma <= 0.6:
        raise DomainError(f"sup scan requires 1/2 < sigma <= 0.6, got {sigma}")
    if grid_step is None:
        grid_step = default_grid_step(sigma)
    if grid_step <= 0:
        raise DomainError(f"grid_step must be > 0, got {grid_step}")
    t_end = harper_window(sigma)
    if t_end < 1.0:
        raise DomainError(f"empty scan window at sigma={sigma}")
    n_points = int(math.floor((t_end - 1.0) / grid_step)) + 1
    weights, logp = _prime_weights(assignment, sigma, prime_limit, table)
    sup_vals, t_stars = scan_grid_max(weights[None, :], logp, 1.0, grid_step, n_points)
    centering = 2.0 * math.log(math.log(1.0 / (sigma - 0.5)))
    return HarperScanResult(
        sigma=float(sigma),
        t_star=float(t_stars[0]),
        sup_value=float(sup_vals[0]),
        centered_value=float(sup_vals[0]) - centering,
        grid_step=float(grid_step),
        prime_limit=prime_limit,
    )


def harper_scan_csv(results: list[HarperScanResult]) -> str:
    """CSV text for scan results: one row per scan."""
    lines = ["sigma,t_star,sup_value,centered_value,grid_step,prime_limit"]
    for r in results:
        lines.append(
            ",".join(
                [
                    fmt_float(r.sigma),
                    fmt_float(r.t_star),
                    fmt_float(r.sup_value),
                    fmt_float(r.centered_value),
                    fmt_float(r.grid_step),
                    str(r.prime_limit),
                ]
            )
        )
    return "\n".join(lines) + "\n"
