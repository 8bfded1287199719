"""Naive trial-division reference used to cross-check the sieve.

Deliberately slow and self-contained: nothing here may import the sieve.
"""

from __future__ import annotations

from .errors import DomainError, UsageError

BRUTEFORCE_CAP = 24


def omega_trial_division(m: int) -> int:
    """Number of prime factors of m counted with multiplicity.

    >>> omega_trial_division(18)
    3
    >>> omega_trial_division(1)
    0
    """
    if m < 1:
        raise DomainError(f"Omega is defined for m >= 1, got {m}")
    count = 0
    while m % 2 == 0:
        m //= 2
        count += 1
    d = 3
    while d * d <= m:
        while m % d == 0:
            m //= d
            count += 1
        d += 2
    if m > 1:
        count += 1
    return count


def row_by_bruteforce(n: int):
    """Histogram of Omega over [1, 2^n] by trial division of every integer."""
    from .triangle import DistributionRow

    if n < 0:
        raise DomainError(f"space exponent must be >= 0, got {n}")
    if n > BRUTEFORCE_CAP:
        raise UsageError(
            f"brute force is capped at n={BRUTEFORCE_CAP}; use count_dimensions for 2^{n}"
        )
    counts = [0] * (n + 1)
    for m in range(1, (1 << n) + 1):
        counts[omega_trial_division(m)] += 1
    return DistributionRow(n, tuple(counts))
