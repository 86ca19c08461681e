import numpy as np
import pytest
from scipy.integrate import quad

from rmflab.errors import DomainError
from rmflab.mellin import (
    DivergenceRow,
    MellinEvaluation,
    abs_mellin_integral,
    boundary_term,
    comparison_csv,
    divergence_comparison,
    evaluate_mellin,
    mellin_step_integral,
    signed_and_absolute_integrals,
    truncated_identity_residual,
)
from rmflab.series import WeightedSumSeries, compute_series
from rmflab.signs import SignAssignment


def quad_oracle(series, s_real: float) -> float:
    """Adaptive quadrature of (s - alpha) * integral M_alpha(x) x^-(s+1-alpha),
    interval by interval (the integrand is smooth inside each [n, n+1))."""
    total = 0.0
    expo = s_real + 1 - series.alpha
    for n in range(1, series.limit):
        coeff = series.values[n]
        if coeff == 0.0:
            continue
        part, _ = quad(lambda x: x**-expo, n, n + 1, epsabs=1e-13, epsrel=1e-13)
        total += coeff * part
    return (s_real - series.alpha) * total


def test_all_ones_series_telescopes():
    series = WeightedSumSeries.from_values(np.ones(500), alpha=0.0)
    for s in (0.7, 1.3 + 0.9j):
        value = mellin_step_integral(series, s)
        assert abs(value - (1 - 500.0 ** (-s))) < 1e-13


def test_two_point_series_single_interval():
    series = WeightedSumSeries.from_values([1.0, 0.3], alpha=0.25)
    s = 1.1
    expected = 1.0 - 2.0 ** (-(s - 0.25))
    assert abs(mellin_step_integral(series, s) - expected) < 1e-15


def test_mellin_matches_quadrature_oracle(table_1e5):
    series = compute_series(SignAssignment.iid(19), "f", 0.5, 400, table_1e5)
    for s in (0.8, 0.62):
        mine = mellin_step_integral(series, s)
        oracle = quad_oracle(series, s)
        assert abs(mine.real - oracle) < 1e-8
        assert abs(mine.imag) < 1e-15


def test_mellin_quadrature_large_series(table_1e5):
    series = compute_series(SignAssignment.iid(40), "f", 0.5, 10**5, table_1e5)
    mine = mellin_step_integral(series, 0.8).real
    oracle = quad_oracle(series, 0.8)
    assert abs(mine - oracle) < 1e-8


def test_divergent_kernel_errors(table_1e5):
    series = compute_series(SignAssignment.iid(19), "f", 0.5, 100, table_1e5)
    with pytest.raises(DomainError):
        mellin_step_integral(series, 0.5)
    with pytest.raises(DomainError):
        abs_mellin_integral(series, 0.4)


def test_truncated_identity_n1(table_1e5):
    series = compute_series(SignAssignment.iid(3), "f", 0.0, 1, table_1e5)
    # sum_{n<=1} g(n) n^-s = 1; integral part 0; boundary M(1) * 1 = 1
    assert mellin_step_integral(series, 1.0) == 0j
    assert boundary_term(series, 1.0) == 1 + 0j
    assert truncated_identity_residual(SignAssignment.iid(3), "f", 0.0, 1.0, 1, table_1e5) == 0.0


def test_truncated_identity_n3_by_hand(table_1e5):
    # explicit signs {2: +1, 3: -1}, alpha = 0, s = 1, N = 3:
    #   dirichlet sum = 1 + 1/2 - 1/3 = 7/6
    #   M = (1, 2, 1); integral = 1*(1 - 1/2) + 2*(1/2 - 1/3) = 5/6
    #   boundary = M(3)/3 = 1/3; total 7/6, residual 0
    a = SignAssignment.explicit({2: 1, 3: -1})
    series = compute_series(a, "f", 0.0, 3, table_1e5)
    assert series.values[1:].tolist() == [1.0, 2.0, 1.0]
    integral = mellin_step_integral(series, 1.0)
    assert abs(integral - 5.0 / 6.0) < 1e-15
    residual = truncated_identity_residual(a, "f", 0.0, 1.0, 3, table_1e5)
    assert residual < 1e-15


def test_truncated_identity_residual_large(table_1e6):
    residual = truncated_identity_residual(SignAssignment.iid(11), "f", 0.5, 0.75, 10**6, table_1e6)
    assert residual <= 1e-9


def test_truncated_identity_random_configurations(table_1e5):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        seed = int(rng.integers(0, 2**32))
        alpha = float(rng.choice([0.0, 0.25, 0.5]))
        re_s = float(rng.uniform(alpha + 0.05, 1.5))
        im_s = float(rng.uniform(-3.0, 3.0)) if rng.random() < 0.5 else 0.0
        limit = int(rng.choice([10**3, 10**4]))
        a = SignAssignment.iid(seed)
        model = str(rng.choice(["f", "fstar"]))
        residual = truncated_identity_residual(a, model, alpha, complex(re_s, im_s), limit, table_1e5)
        series = compute_series(a, model, alpha, limit, table_1e5)
        scale = abs(mellin_step_integral(series, complex(re_s, im_s)) + boundary_term(series, complex(re_s, im_s))) + 1.0
        assert residual <= 1e-9 * scale


def test_kernel_positivity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        alpha = float(rng.choice([0.0, 0.25, 0.5]))
        sigma = float(rng.uniform(alpha + 0.01, 1.5))
        n = np.arange(1, 500, dtype=np.float64)
        powers = n ** (-(sigma - alpha))
        weights = powers[:-1] - powers[1:]
        assert (weights > 0).all()


def test_abs_integral_triangle_inequality(table_1e5):
    series = compute_series(SignAssignment.iid(23), "fstar", 0.25, 10**4, table_1e5)
    for sigma in (0.3, 0.6, 1.0):
        signed, absolute = signed_and_absolute_integrals(series, sigma)
        assert absolute >= abs(signed)
        assert abs(absolute - abs_mellin_integral(series, sigma)) == 0.0


def test_abs_integral_on_nonnegative_series(table_1e5):
    values = np.abs(np.random.default_rng(5).normal(size=300)) + 0.1
    series = WeightedSumSeries.from_values(values, alpha=0.0)
    sigma = 0.9
    signed, absolute = signed_and_absolute_integrals(series, sigma)
    assert signed == absolute
    direct = mellin_step_integral(series, sigma).real / sigma
    assert abs(absolute - direct) < 1e-12 * max(1.0, abs(direct))


def test_abs_integral_alternating_series_collapses():
    alternating = np.array([(-1.0) ** n for n in range(1, 301)])
    ones = np.ones(300)
    s_alt = WeightedSumSeries.from_values(alternating, alpha=0.0)
    s_one = WeightedSumSeries.from_values(ones, alpha=0.0)
    assert abs(abs_mellin_integral(s_alt, 0.8) - abs_mellin_integral(s_one, 0.8)) < 1e-15


def test_series_negation_flips_signed_fixes_absolute(table_1e5):
    series = compute_series(SignAssignment.iid(29), "f", 0.0, 5000, table_1e5)
    neg = WeightedSumSeries.from_values(-series.values[1:], alpha=0.0)
    for sigma in (0.6, 1.0):
        signed, absolute = signed_and_absolute_integrals(series, sigma)
        signed_neg, absolute_neg = signed_and_absolute_integrals(neg, sigma)
        assert signed_neg == -signed
        assert absolute_neg == absolute


def test_evaluate_mellin_record(table_1e5):
    series = compute_series(SignAssignment.iid(2), "f", 0.25, 2000, table_1e5)
    ev = evaluate_mellin(series, 0.8)
    assert isinstance(ev, MellinEvaluation)
    assert ev.abs_integral is not None
    assert ev.abs_integral >= abs(ev.signed_integral) / (0.8 - 0.25) - 1e-12
    ev_complex = evaluate_mellin(series, 0.8 + 1.0j)
    assert ev_complex.abs_integral is None


def test_divergence_comparison_validation(table_1e5):
    a = SignAssignment.iid(1)
    with pytest.raises(DomainError):
        divergence_comparison(a, "f", 0.5, [], 100, 100, table_1e5)
    with pytest.raises(DomainError):
        divergence_comparison(a, "f", 0.5, [0.52, 0.56], 100, 100, table_1e5)
    with pytest.raises(DomainError):
        divergence_comparison(a, "f", 0.5, [0.8, 0.6], 100, 100, table_1e5)
    with pytest.raises(DomainError):
        divergence_comparison(a, "f", 0.5, [0.65, 0.55], 100, 100, table_1e5)


def test_divergence_comparison_rows(table_1e5):
    a = SignAssignment.iid(12)
    rows = divergence_comparison(a, "f", 0.5, [0.58, 0.54], 2000, 10**4, table_1e5)
    assert [r.sigma for r in rows] == [0.58, 0.54]
    for row in rows:
        assert row.absolute >= abs(row.signed)
        assert row.harper_witness > 0
        assert row.limit == 2000 and row.prime_limit == 10**4
        assert row.seed == 12
    minus_rows = divergence_comparison(
        SignAssignment.all_minus_one(), "fstar", 0.0, [0.58], 500, 1000, table_1e5
    )
    assert minus_rows[0].seed == 0


def test_comparison_csv_schema(table_1e5):
    rows = [DivergenceRow(0.58, 1.5, 2.0, 0.3, 100, 1000, 7)]
    text = comparison_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "sigma,signed,absolute,harper_witness,N,prime_limit,seed"
    assert lines[1].split(",")[4:] == ["100", "1000", "7"]
