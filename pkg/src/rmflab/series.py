"""Weighted partial sums M_alpha(x) = sum_{n<=x} g(n)/n^alpha and their signs.

M_alpha is a right-continuous step function of x, constant between
consecutive integers, so the integer samples stored here are a lossless
representation; the mellin module relies on exactly this.

Summation is plain float64 accumulation in ascending n (np.cumsum), which is
sequential and therefore bit-reproducible across runs and thread counts.  At
desk scale the rounding this admits sits far below statistical noise; the
reconstruction test M_alpha(x) - M_alpha(x-1) = g(x)/x^alpha quantifies it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .output import fmt_float
from .primes import SpfTable, build_spf_sieve
from .signs import MultiplicativeEvaluator, SignAssignment


class Model(str, enum.Enum):
    """The two function models: squarefree-supported f, completely
    multiplicative fstar."""

    F = "f"
    F_STAR = "fstar"


@dataclass(frozen=True)
class WeightedSumSeries:
    """M_alpha(1..limit) for one model, one assignment realization.

    ``values[x]`` holds M_alpha(x) for 1 <= x <= limit (index 0 unused, 0.0).
    max_abs is the running maximum of |M_alpha(x)|, argmax the smallest x
    attaining it.
    """

    model: Model
    alpha: float
    limit: int
    values: np.ndarray = field(repr=False)
    max_abs: float
    argmax: int

    @classmethod
    def from_values(cls, values, model: Model | str = Model.F, alpha: float = 0.0):
        """Wrap an explicit sequence M(1), ..., M(N); mainly for synthetic
        series in tests and for oracle comparisons."""
        arr = np.concatenate([[0.0], np.asarray(values, dtype=np.float64)])
        if arr.size < 2:
            raise DomainError("series needs at least one value")
        body = np.abs(arr[1:])
        k = int(np.argmax(body))
        return cls(
            model=Model(model),
            alpha=float(alpha),
            limit=arr.size - 1,
            values=arr,
            max_abs=float(body[k]),
            argmax=k + 1,
        )


@dataclass(frozen=True)
class SignChangeLog:
    """Positions where the partial sum crosses between strictly positive and
    strictly negative values, zeros ignored.

    A crossing is recorded at the smallest x whose sign is strictly opposite
    to the last recorded nonzero sign, so signs at consecutive crossings
    alternate.  first_sign is the sign of the first nonzero value (0 if the
    series is identically zero).
    """

    positions: np.ndarray
    count: int
    first_sign: int

    def signs_after(self) -> np.ndarray:
        """Sign that holds right after each recorded crossing."""
        k = np.arange(1, self.count + 1)
        return self.first_sign * (-1) ** k


def _kahan_cumsum(weights: np.ndarray) -> np.ndarray:
    """Compensated running sum; the validation mode for the plain cumsum."""
    out = np.empty_like(weights)
    total = 0.0
    carry = 0.0
    for i, w in enumerate(weights):
        y = w - carry
        t = total + y
        carry = (t - total) - y
        total = t
        out[i] = total
    return out


def compute_series(
    assignment: SignAssignment,
    model: Model | str,
    alpha: float,
    limit: int,
    table: SpfTable | None = None,
    compensated: bool = False,
) -> WeightedSumSeries:
    """Stream M_alpha(1..limit) for g in {f, fstar}.

    alpha is restricted to [0, 1]: the regime of interest is [0, 1/2], the
    rest is a convergence sanity range.  Cost is one bulk evaluation of g
    plus a cumulative sum, O(limit log limit) in the worst case.

    compensated=True switches to Kahan-compensated accumulation (much
    slower, for validating that plain float64 rounding stays negligible).
    """
    model = Model(model)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    if table is None:
        table = build_spf_sieve(max(limit, 2))
    evaluator = MultiplicativeEvaluator(assignment, table)
    g = evaluator.values_up_to(limit, model.value).astype(np.float64)
    x = np.arange(limit + 1, dtype=np.float64)
    x[0] = 1.0
    weights = g * np.power(x, -float(alpha))
    values = np.empty(limit + 1, dtype=np.float64)
    values[0] = 0.0
    if compensated:
        values[1:] = _kahan_cumsum(weights[1:])
    else:
        np.cumsum(weights[1:], out=values[1:])
    body = np.abs(values[1:])
    k = int(np.argmax(body))
    return WeightedSumSeries(
        model=model,
        alpha=float(alpha),
        limit=limit,
        values=values,
        max_abs=float(body[k]),
        argmax=k + 1,
    )


def detect_sign_changes(series: WeightedSumSeries) -> SignChangeLog:
    """Crossing positions of the series, by the zeros-ignored rule.

    Exact zeros (possible only at alpha = 0, where sums are integers) never
    create or destroy a crossing by themselves.
    """
    v = series.values[1:]
    s = np.sign(v)
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return SignChangeLog(positions=np.empty(0, dtype=np.int64), count=0, first_sign=0)
    sn = s[nz]
    flips = np.flatnonzero(sn[1:] != sn[:-1])
    positions = (nz[flips + 1] + 1).astype(np.int64)
    return SignChangeLog(positions=positions, count=int(positions.size), first_sign=int(sn[0]))


def riesz_mean(
    assignment: SignAssignment,
    x: int,
    table: SpfTable | None = None,
) -> float:
    """sum_{n<=x} (f(n)/sqrt(n)) * log(x/n), natural log.

    The smoothed average that approximates sum_{n<=x} fstar(n)/sqrt(n) after
    convolving f with the perfect-square indicator.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if table is None:
        table = build_spf_sieve(max(x, 2))
    evaluator = MultiplicativeEvaluator(assignment, table)
    f = evaluator.values_up_to(x, "f").astype(np.float64)[1:]
    n = np.arange(1, x + 1, dtype=np.float64)
    return float(np.sum(f / np.sqrt(n) * np.log(x / n)))


def growth_statistic(series: WeightedSumSeries, theta: float) -> float:
    """max over 16 <= x <= limit of |M_0(x)| / (sqrt(x) (log log x)^theta).

    Requires alpha = 0 (the unweighted sums whose growth envelope is
    sqrt(x) times powers of log log x) and limit >= 16 so the normalizer
    exceeds 1 on the whole range.
    """
    if series.alpha != 0.0:
        raise DomainError(f"growth statistic needs alpha = 0, got {series.alpha}")
    if series.limit < 16:
        raise DomainError(f"growth statistic needs limit >= 16, got {series.limit}")
    x = np.arange(16, series.limit + 1, dtype=np.float64)
    norm = np.sqrt(x) * np.log(np.log(x)) ** float(theta)
    return float(np.max(np.abs(series.values[16:]) / norm))


def series_csv(series: WeightedSumSeries) -> str:
    """CSV text of the series: header "x,value"."""
    lines = ["x,value"]
    for x in range(1, series.limit + 1):
        lines.append(f"{x},{fmt_float(series.values[x])}")
    return "\n".join(lines) + "\n"


def sign_changes_csv(log: SignChangeLog) -> str:
    """CSV text of a sign-change log: header "position,sign_after"."""
    lines = ["position,sign_after"]
    after = log.signs_after()
    for pos, sign in zip(log.positions, after):
        lines.append(f"{pos},{sign}")
    return "\n".join(lines) + "\n"
