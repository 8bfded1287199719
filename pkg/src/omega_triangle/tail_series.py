"""Diagonals of the triangle near its right edge and their exact limits.

The entry at column n - x of row 2^n counts numbers m <= 2^n with
Omega(m) = n - x.  Writing m = 2^a * q with q odd and Omega(q) = j forces
a = n - x - j and q <= 2^(x + j).  Once n - x reaches the largest feasible j
the count no longer depends on n, so every diagonal settles on the number of
such odd parts.  Since 3^j <= q <= 2^(x + j), j is bounded and the
enumeration is finite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, UsageError
from .omega_sieve import base_primes
from .triangle import Triangle


@dataclass(frozen=True)
class TailSeries:
    offset: int
    values: list[tuple[int, int]]  # (exponent, count)
    limit: int
    convergence_exponent: int
    witnesses: list[tuple[int, int]]  # (j, odd q)


def diagonal_series(t: Triangle, x: int) -> list[tuple[int, int]]:
    """Entries (n, rows[n][n - x]) for n = x+1 .. max_exponent."""
    if not 0 <= x <= t.max_exponent - 1:
        raise UsageError(
            f"offset x must be in [0, {t.max_exponent - 1}] for a triangle to 2^{t.max_exponent}"
        )
    return [(n, t.rows[n].counts[n - x]) for n in range(x + 1, t.max_exponent + 1)]


def max_odd_dimension(x: int) -> int:
    """Largest j with 3^j <= 2^(x+j), i.e. the deepest odd part that can fit."""
    j = 0
    while 3 ** (j + 1) <= 1 << (x + j + 1):
        j += 1
    return j


def _odd_parts(j: int, bound: int, odd_primes: list[int]) -> list[int]:
    """Odd q <= bound with exactly j prime factors, built from non-decreasing
    prime sequences so each q appears once."""
    found = []

    def extend(start: int, product: int, remaining: int):
        if remaining == 0:
            found.append(product)
            return
        for i in range(start, len(odd_primes)):
            p = odd_primes[i]
            if product * p**remaining > bound:
                break
            extend(i, product * p, remaining - 1)

    extend(0, 1, j)
    return sorted(found)


def tail_limit(x: int) -> tuple[int, list[tuple[int, int]]]:
    """Eventual value of diagonal x and the (j, q) witnesses that make it up.

    >>> tail_limit(2)
    (7, [(0, 1), (1, 3), (1, 5), (1, 7), (2, 9), (2, 15), (3, 27)])
    """
    if x < 0:
        raise DomainError(f"offset must be >= 0, got {x}")
    witnesses = [(0, 1)]
    j_bound = max_odd_dimension(x)
    if j_bound >= 1:
        # the largest prime in any witness is at most 2^(x+1)
        odd_primes = base_primes(1 << (x + 1))[1:]
        for j in range(1, j_bound + 1):
            witnesses.extend((j, q) for q in _odd_parts(j, 1 << (x + j), odd_primes))
    return len(witnesses), witnesses


def convergence_exponent(x: int) -> int:
    """Smallest n from which diagonal x equals its limit.

    The diagonal starts at row x + 1, so the answer is never below that.
    """
    if x < 0:
        raise DomainError(f"offset must be >= 0, got {x}")
    # 3^j is always a witness, so the deepest witness has j = max_odd_dimension
    return x + max(max_odd_dimension(x), 1)


def tail_series(t: Triangle, x: int) -> TailSeries:
    limit, witnesses = tail_limit(x)
    return TailSeries(
        offset=x,
        values=diagonal_series(t, x),
        limit=limit,
        convergence_exponent=convergence_exponent(x),
        witnesses=witnesses,
    )
