import numpy as np
import pytest

from rmflab.errors import DomainError
from rmflab.primes import build_spf_sieve, factorize, is_squarefree, primes_up_to

from conftest import oracle_prime_mask


def test_spf_limit_10():
    table = build_spf_sieve(10)
    expected = {2: 2, 3: 3, 4: 2, 5: 5, 6: 2, 7: 7, 8: 2, 9: 3, 10: 2}
    for n, spf in expected.items():
        assert table.spf[n] == spf


def test_spf_smallest_case():
    table = build_spf_sieve(2)
    assert table.limit == 2
    assert table.spf[2] == 2


def test_spf_fixed_point_count_is_prime_count(table_1e6):
    # number of n with spf[n] = n equals pi(10^6), checked against the
    # independent trial-division sieve
    n = np.arange(table_1e6.limit + 1, dtype=np.uint32)
    fixed = int(np.count_nonzero(table_1e6.spf[2:] == n[2:]))
    oracle = int(np.count_nonzero(oracle_prime_mask(10**6)))
    assert fixed == oracle == 78498


def test_primes_up_to_small_cases():
    assert primes_up_to(build_spf_sieve(10)).tolist() == [2, 3, 5, 7]
    assert primes_up_to(build_spf_sieve(2)).tolist() == [2]


def test_primes_up_to_1e4_count():
    primes = primes_up_to(build_spf_sieve(10**4))
    oracle = int(np.count_nonzero(oracle_prime_mask(10**4)))
    assert len(primes) == oracle == 1229


def test_primes_up_to_matches_oracle_exhaustive(table_1e5):
    oracle = np.flatnonzero(oracle_prime_mask(10**5))
    assert np.array_equal(primes_up_to(table_1e5), oracle)


def test_factorize_trivial(table_1e5):
    assert factorize(12, table_1e5) == [(2, 2), (3, 1)]
    assert factorize(1, table_1e5) == []


def test_factorize_primorial():
    table = build_spf_sieve(9699690)
    pairs = factorize(9699690, table)
    assert pairs == [(p, 1) for p in (2, 3, 5, 7, 11, 13, 17, 19)]
    product = 1
    for p, a in pairs:
        product *= p**a
    assert product == 9699690


def test_factorize_reconstructs_random_n(table_1e6):
    rng = np.random.default_rng(321)
    for n in rng.integers(1, table_1e6.limit + 1, size=10**5):
        n = int(n)
        product = 1
        last = 1
        for p, a in factorize(n, table_1e6):
            assert p > last, "primes must be strictly increasing"
            assert a >= 1
            last = p
            product *= p**a
        assert product == n


def test_is_squarefree_trivial(table_1e5):
    assert is_squarefree(10, table_1e5)
    assert not is_squarefree(12, table_1e5)


def test_squarefree_count_1e6(table_1e6):
    # independent oracle: knock out multiples of the squares d^2
    free = np.ones(10**6 + 1, dtype=bool)
    free[0] = False
    for d in range(2, 1001):
        free[d * d :: d * d] = False
    oracle_count = int(np.count_nonzero(free[1:]))
    count = sum(is_squarefree(n, table_1e6) for n in range(1, 10**6 + 1, 97))
    oracle_sampled = int(np.count_nonzero(free[1 : 10**6 + 1 : 97]))
    assert count == oracle_sampled
    assert oracle_count == 607926


def test_squarefree_iff_all_exponents_one_exhaustive(table_1e5):
    for n in range(1, 10**4 + 1):
        expected = all(a == 1 for _, a in factorize(n, table_1e5))
        assert is_squarefree(n, table_1e5) == expected


def test_spf_divides_and_is_prime(table_1e6):
    mask = oracle_prime_mask(10**3)
    rng = np.random.default_rng(5)
    for n in rng.integers(2, 10**6, size=2000):
        n = int(n)
        p = int(table_1e6.spf[n])
        assert n % p == 0
        if p < len(mask):
            assert mask[p]


def test_errors():
    with pytest.raises(DomainError):
        build_spf_sieve(1)
    with pytest.raises(DomainError):
        build_spf_sieve(2**32)
    table = build_spf_sieve(100)
    with pytest.raises(DomainError):
        factorize(0, table)
    with pytest.raises(DomainError):
        factorize(101, table)
    with pytest.raises(DomainError):
        is_squarefree(1000, table)


def test_allocation_failure_reports_size(monkeypatch):
    from rmflab.errors import ResourceError
    import rmflab.primes as primes_module

    def failing_zeros(*args, **kwargs):
        raise MemoryError

    monkeypatch.setattr(primes_module.np, "zeros", failing_zeros)
    with pytest.raises(ResourceError) as info:
        build_spf_sieve(10**6)
    assert info.value.requested_bytes == 4 * (10**6 + 1)


def test_table_is_immutable(table_1e5):
    with pytest.raises(ValueError):
        table_1e5.spf[10] = 3
