"""Smallest-prime-factor sieve, factorization and squarefree tests.

The sieve is the only piece of shared number-theoretic state in the package:
everything downstream (sign evaluation, partial sums, prime sums) factors
integers by repeated division by the smallest prime factor.

Memory: entries are stored as uint32, so a table up to N costs 4*(N+1) bytes
plus numpy overhead (40 MB at N=10^7, 400 MB at N=10^8).  N may not exceed
2^32 - 1.  Construction is single-threaded; the finished table is immutable
and safe for concurrent reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError

#: Largest supported sieve limit (uint32 entries).
MAX_LIMIT = 2**32 - 1


@dataclass(frozen=True)
class SpfTable:
    """Smallest prime factor of every integer in [2, limit].

    ``spf[n]`` is the smallest prime factor of n for 2 <= n <= limit
    (entries 0 and 1 are unused and set to 0).  ``spf[p] == p`` exactly when
    p is prime.
    """

    limit: int
    spf: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.spf.setflags(write=False)

    def check_range(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside sieve range [1, {self.limit}]")


def build_spf_sieve(limit: int) -> SpfTable:
    """Build the smallest-prime-factor table for [2, limit].

    Deterministic; raises DomainError for limit < 2 and ResourceError if the
    4*(limit+1)-byte array cannot be allocated.
    """
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise DomainError(f"sieve limit {limit} exceeds uint32 bound {MAX_LIMIT}")
    try:
        spf = np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError as exc:
        raise ResourceError(
            f"cannot allocate spf table for limit {limit}",
            requested_bytes=4 * (limit + 1),
        ) from exc
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    # Remaining zero entries at n >= 2 are primes > sqrt(limit).
    n = np.arange(limit + 1, dtype=np.uint32)
    mask = (spf == 0) & (n >= 2)
    spf[mask] = n[mask]
    return SpfTable(limit=limit, spf=spf)


def primes_up_to(table: SpfTable) -> np.ndarray:
    """All primes <= table.limit, strictly increasing, as int64."""
    n = np.arange(2, table.limit + 1, dtype=np.uint32)
    return (np.flatnonzero(table.spf[2:] == n) + 2).astype(np.int64)


def factorize(n: int, table: SpfTable) -> list[tuple[int, int]]:
    """Prime factorization of n as (prime, exponent) pairs, primes increasing.

    n = 1 yields the empty list (empty product).
    """
    table.check_range(n)
    out: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(table.spf[m])
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        out.append((p, a))
    return out


def is_squarefree(n: int, table: SpfTable) -> bool:
    """True iff no prime divides n twice (mu^2(n) = 1)."""
    table.check_range(n)
    m = n
    while m > 1:
        p = int(table.spf[m])
        m //= p
        if m % p == 0:
            return False
    return True
