"""Segmented sieve for Omega(m), the number of prime factors of m counted with
multiplicity, aggregated into per-dimension tallies.

Each segment [lo, hi] is sieved independently: for every prime power p^k <= hi
the multiples of p^k in the segment gain one prime factor.  The product of the
extracted prime powers is tracked alongside, and a number whose product falls
short of the number itself has a leftover cofactor.  That cofactor has no prime
factor <= sqrt(hi), so it is a single prime and adds exactly one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError

DEFAULT_SEGMENT_SIZE = 1 << 22
MIN_SEGMENT_SIZE = 1 << 10
_U64_MAX = (1 << 64) - 1


def base_primes(limit: int) -> list[int]:
    """Return the primes in [2, limit] in ascending order.

    >>> base_primes(10)
    [2, 3, 5, 7]
    """
    if limit < 2:
        raise DomainError(f"no primes below 2 (limit={limit})")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).tolist()


def _next_prime_after(p: int) -> int:
    q = p + 1
    while any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        q += 1
    return q


def _check_coverage(hi: int, primes: list[int]) -> None:
    root = math.isqrt(hi)
    if root < 2:
        return
    if not primes or primes[0] != 2:
        raise PreconditionError(f"prime list must start at 2 to sieve up to {hi}")
    if primes[-1] < root and _next_prime_after(primes[-1]) <= root:
        raise PreconditionError(
            f"primes up to {primes[-1]} do not cover sqrt({hi}) = {root}"
        )


@dataclass(frozen=True, eq=False)
class Segment:
    """Per-dimension tallies for the closed interval [lo, hi]."""

    lo: int
    hi: int
    counts: np.ndarray  # uint64, index = dimension

    def __post_init__(self):
        assert 1 <= self.lo <= self.hi
        assert len(self.counts) == self.hi.bit_length()
        assert int(self.counts.sum()) == self.hi - self.lo + 1

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and np.array_equal(self.counts, other.counts)
        )


def omega_values(lo: int, hi: int, primes: list[int]) -> np.ndarray:
    """Omega(m) for every m in [lo, hi] as a uint8 array."""
    size = hi - lo + 1
    dtype = np.uint32 if hi < (1 << 32) else np.uint64
    omega = np.zeros(size, dtype=np.uint8)
    extracted = np.ones(size, dtype=dtype)
    root = math.isqrt(hi)
    for p in primes:
        if p > root:
            break
        pk = p
        while pk <= hi:
            start = (-lo) % pk
            if start < size:
                omega[start::pk] += 1
                extracted[start::pk] *= p
            pk *= p
    # extracted divides m, so it is smaller exactly when a prime cofactor is left
    omega += extracted < np.arange(lo, hi + 1, dtype=dtype)
    return omega


def sieve_segment(lo: int, hi: int, primes: list[int]) -> Segment:
    """Tally Omega over [lo, hi].

    ``primes`` must contain every prime <= sqrt(hi) (it may contain more).
    """
    if not 1 <= lo <= hi:
        raise DomainError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    assert hi <= _U64_MAX, "tallies would overflow 64 bits"
    _check_coverage(hi, primes)
    omega = omega_values(lo, hi, primes)
    counts = np.bincount(omega, minlength=hi.bit_length()).astype(np.uint64)
    return Segment(lo, hi, counts)


def merge_counts(counts_list, width: int) -> np.ndarray:
    """Sum per-dimension tallies in the given order into one uint64 array."""
    total = np.zeros(width, dtype=np.uint64)
    for counts in counts_list:
        total[: len(counts)] += counts
    return total


def resolve_threads(threads: int | str | None) -> int:
    if threads is None or threads == "auto":
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise DomainError(f"thread count must be >= 1, got {threads}")
    return threads


def sieve_range(
    lo: int,
    hi: int,
    primes: list[int] | None = None,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | str = 1,
) -> np.ndarray:
    """Tally Omega over [lo, hi] by splitting it into segments.

    Returns a uint64 array of length ``hi.bit_length()``.  Segments are merged
    in ascending order whatever the thread count, so the result is identical
    to a sequential run.
    """
    if not 1 <= lo <= hi:
        raise DomainError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    if segment_size < 1:
        raise DomainError(f"segment size must be positive, got {segment_size}")
    if primes is None:
        primes = base_primes(max(2, math.isqrt(hi)))
    _check_coverage(hi, primes)
    bounds = [
        (a, min(a + segment_size - 1, hi)) for a in range(lo, hi + 1, segment_size)
    ]
    workers = min(resolve_threads(threads), len(bounds))
    if workers <= 1:
        parts = (sieve_segment(a, b, primes).counts for a, b in bounds)
        return merge_counts(parts, hi.bit_length())
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda ab: sieve_segment(ab[0], ab[1], primes).counts, bounds)
        return merge_counts(parts, hi.bit_length())


def count_dimensions(
    n: int, *, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int | str = 1
):
    """Distribution of Omega over the 2^n space [1, 2^n]."""
    from .triangle import DistributionRow

    if n < 0:
        raise DomainError(f"space exponent must be >= 0, got {n}")
    counts = sieve_range(1, 1 << n, segment_size=segment_size, threads=threads)
    return DistributionRow(n, tuple(int(c) for c in counts[: n + 1]))
