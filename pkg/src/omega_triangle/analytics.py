"""Row- and column-level statistics over a triangle: where the largest column
sits, log counts down a column with their neighbor differences, and the
entropy of each row next to the matching row of Pascal's triangle."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .errors import DomainError, IntegrityError, UsageError
from .triangle import DistributionRow, Triangle

PASCAL_EXACT_MAX = 60


# -- max column ----------------------------------------------------------------


def max_column(row: DistributionRow, min_dimension: int = 0) -> tuple[int, bool]:
    """Smallest dimension holding the largest count, and whether another
    dimension ties with it.  Dimensions below ``min_dimension`` are ignored."""
    counts = row.counts[min_dimension:]
    if not counts:
        raise UsageError(f"row 2^{row.exponent} has no dimension >= {min_dimension}")
    top = max(counts)
    return min_dimension + counts.index(top), counts.count(top) > 1


def max_column_transitions(t: Triangle) -> list[tuple[int, int]]:
    """Exponents at which the largest column moves, with its new index.

    The 0D column always holds the single number 1, so it is left out; the
    baseline is row 2^1.
    """
    transitions = []
    current = None
    for row in t.rows[1:]:
        index, _ = max_column(row, min_dimension=1)
        if current is not None and index != current:
            transitions.append((row.exponent, index))
        current = index
    return transitions


def tied_rows(t: Triangle) -> list[int]:
    """Exponents whose largest count (over dimensions >= 1) is shared."""
    return [row.exponent for row in t.rows[1:] if max_column(row, 1)[1]]


# -- log counts and neighbor differences ------------------------------------------


@dataclass(frozen=True)
class DiffEntry:
    exponent: int
    ln_count: float
    diff: float | None


@dataclass(frozen=True)
class DiffSeries:
    column: int
    entries: list[DiffEntry]

    @property
    def diffs(self) -> list[float]:
        return [e.diff for e in self.entries if e.diff is not None]

    def entry(self, exponent: int) -> DiffEntry:
        for e in self.entries:
            if e.exponent == exponent:
                return e
        raise KeyError(exponent)


def column_diffs(t: Triangle, x: int) -> DiffSeries:
    """Natural log of column x down the triangle and the change between
    consecutive rows.  Zero counts are skipped and break the difference chain."""
    if not 0 <= x <= t.max_exponent:
        raise UsageError(f"column must be in [0, {t.max_exponent}], got {x}")
    entries = []
    prev = None  # (exponent, ln) of the previous non-zero cell
    for n in range(x, t.max_exponent + 1):
        count = t.rows[n].counts[x]
        if count == 0:
            prev = None
            continue
        ln = math.log(count)
        diff = ln - prev[1] if prev is not None and prev[0] == n - 1 else None
        entries.append(DiffEntry(n, ln, diff))
        prev = (n, ln)
    return DiffSeries(x, entries)


def diff_tail_stats(series: DiffSeries, window: int) -> tuple[float, float]:
    """Mean and population standard deviation of the last ``window`` diffs."""
    if window < 2:
        raise UsageError(f"window must be >= 2, got {window}")
    diffs = series.diffs
    if len(diffs) < window:
        raise UsageError(
            f"column {series.column} has {len(diffs)} differences, window is {window}"
        )
    tail = diffs[-window:]
    return statistics.fmean(tail), statistics.pstdev(tail)


# -- entropy ---------------------------------------------------------------------


def row_entropy(counts, total: int) -> float:
    """Gibbs entropy -sum(P ln P) with P = count / total; empty cells add 0."""
    if total <= 0:
        raise DomainError(f"total must be positive, got {total}")
    if sum(counts) != total:
        raise IntegrityError(f"counts sum to {sum(counts)}, expected {total}")
    return 0.0 - math.fsum(c / total * math.log(c / total) for c in counts if c > 0)


def pascal_row(n: int) -> list[int]:
    """Binomial coefficients C(n, 0..n)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > PASCAL_EXACT_MAX:
        raise UsageError(
            f"exact Pascal rows stop at n={PASCAL_EXACT_MAX}; use pascal_entropy for n={n}"
        )
    return [math.comb(n, k) for k in range(n + 1)]


def pascal_entropy_lgamma(n: int) -> float:
    """Entropy of Binomial(n, 1/2) from log-gamma binomials."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    head = math.lgamma(n + 1) - n * math.log(2)
    terms = []
    for k in range(n + 1):
        ln_p = head - math.lgamma(k + 1) - math.lgamma(n - k + 1)
        terms.append(math.exp(ln_p) * ln_p)
    return 0.0 - math.fsum(terms)


def pascal_entropy(n: int) -> float:
    if n <= PASCAL_EXACT_MAX:
        return row_entropy(pascal_row(n), 1 << n)
    return pascal_entropy_lgamma(n)


@dataclass(frozen=True)
class EntropyEntry:
    exponent: int
    s_dim: float
    s_pascal: float


@dataclass(frozen=True)
class EntropyReport:
    entries: list[EntropyEntry]


def entropy_report(t: Triangle) -> EntropyReport:
    return EntropyReport(
        [
            EntropyEntry(
                row.exponent, row_entropy(row.counts, row.total), pascal_entropy(row.exponent)
            )
            for row in t.rows
        ]
    )
