"""The dimensions-distribution triangle: build, validate, serialize, cache."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import re
import tempfile
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import (
    DomainError,
    IntegrityError,
    ParseError,
    ResourceExhaustedError,
    UsageError,
)
from .omega_sieve import DEFAULT_SEGMENT_SIZE, base_primes, sieve_range

log = logging.getLogger(__name__)

FORMATS = ("tsv", "csv", "json")
SCHEMA_VERSION = 1
CACHE_ENV = "OMEGA_TRIANGLE_CACHE"
_LABEL = re.compile(r"^2\^(\d+)$")


@dataclass(frozen=True)
class DistributionRow:
    """Counts of each dimension 0..exponent within [1, 2^exponent]."""

    exponent: int
    counts: tuple[int, ...]

    def __post_init__(self):
        n, counts = self.exponent, self.counts
        if n < 0:
            raise IntegrityError(f"negative exponent {n}")
        if len(counts) != n + 1:
            raise IntegrityError(
                f"row 2^{n}: expected {n + 1} counts, got {len(counts)}"
            )
        if any(c < 0 or c >> 64 for c in counts):
            raise IntegrityError(f"row 2^{n}: counts must fit in 64 unsigned bits")
        total = sum(counts)
        if total != 1 << n:
            raise IntegrityError(f"row 2^{n}: sum {total} != {1 << n}")
        if counts[0] != 1:
            raise IntegrityError(f"row 2^{n}: column 0 is {counts[0]}, expected 1")
        if n >= 1 and counts[n] != 1:
            raise IntegrityError(f"row 2^{n}: column {n} is {counts[n]}, expected 1")

    @property
    def total(self) -> int:
        return 1 << self.exponent

    def __getitem__(self, d: int) -> int:
        return self.counts[d]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class TriangleMeta:
    built_at: str | None = None
    version: str | None = None
    segment_size: int | None = None

    def to_json(self) -> dict:
        return {
            "built_at": self.built_at,
            "version": self.version,
            "segment_size": self.segment_size,
        }


@dataclass(frozen=True)
class Triangle:
    """Rows 2^0 .. 2^max_exponent.  Equality ignores metadata."""

    max_exponent: int
    rows: tuple[DistributionRow, ...]
    meta: TriangleMeta = field(default_factory=TriangleMeta, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.max_exponent + 1:
            raise IntegrityError(
                f"expected {self.max_exponent + 1} rows, got {len(self.rows)}"
            )
        prev = None
        for n, row in enumerate(self.rows):
            if row.exponent != n:
                raise IntegrityError(f"row {n} is labelled 2^{row.exponent}")
            if prev is not None:
                for d, c in enumerate(row.counts):
                    before = prev.counts[d] if d < len(prev.counts) else 0
                    if c < before:
                        raise IntegrityError(
                            f"row 2^{n}: column {d} shrank from {before} to {c}"
                        )
            prev = row

    def __getitem__(self, n: int) -> DistributionRow:
        return self.rows[n]

    def truncated(self, max_exponent: int) -> Triangle:
        if not 0 <= max_exponent <= self.max_exponent:
            raise UsageError(f"cannot truncate to {max_exponent}")
        return Triangle(max_exponent, self.rows[: max_exponent + 1], self.meta)


def _build_timestamp() -> str:
    # SOURCE_DATE_EPOCH keeps JSON output reproducible across runs
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        if epoch
        else datetime.now(timezone.utc)
    )
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def build_triangle(
    max_exponent: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | str = 1,
) -> Triangle:
    """Build rows 0..max_exponent, each from the previous row plus a sieve of
    the new half (2^(n-1), 2^n]."""
    if max_exponent < 0:
        raise DomainError(f"max exponent must be >= 0, got {max_exponent}")
    primes = base_primes(max(2, math.isqrt(1 << max_exponent)))
    rows = [DistributionRow(0, (1,))]
    for n in range(1, max_exponent + 1):
        started = time.perf_counter()
        try:
            new = sieve_range(
                (1 << (n - 1)) + 1,
                1 << n,
                primes,
                segment_size=segment_size,
                threads=threads,
            )
        except MemoryError as exc:
            raise ResourceExhaustedError(n) from exc
        prev = rows[-1].counts
        counts = tuple(
            (prev[d] if d < len(prev) else 0) + int(new[d]) for d in range(n + 1)
        )
        rows.append(DistributionRow(n, counts))
        log.debug("row 2^%d built in %.3fs", n, time.perf_counter() - started)
    meta = TriangleMeta(_build_timestamp(), __version__, segment_size)
    return Triangle(max_exponent, tuple(rows), meta)


# -- serialization -----------------------------------------------------------


def export_triangle(t: Triangle, format: str = "tsv") -> str:
    """Render a triangle as TSV, CSV or JSON text."""
    if format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "max_exponent": t.max_exponent,
            "meta": t.meta.to_json(),
            "rows": [list(row.counts) for row in t.rows],
        }
        return json.dumps(payload) + "\n"
    if format not in FORMATS:
        raise UsageError(f"unknown format {format!r}; choose from {', '.join(FORMATS)}")
    buf = io.StringIO()
    writer = csv.writer(
        buf, delimiter="\t" if format == "tsv" else ",", lineterminator="\n"
    )
    writer.writerow([""] + list(range(t.max_exponent + 1)))
    for row in t.rows:
        writer.writerow([f"2^{row.exponent}", *row.counts])
    return buf.getvalue()


def _parse_count(text: str, line: int) -> int:
    text = text.strip()
    if not text.isdigit():
        raise ParseError(f"not an unsigned integer: {text!r}", line)
    return int(text)


def _import_delimited(text: str, delimiter: str) -> Triangle:
    rows = []
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    for fields in reader:
        line = reader.line_num
        if not fields or all(not f.strip() for f in fields):
            continue
        label = fields[0].strip()
        if not label:
            continue  # header of dimension indices
        match = _LABEL.match(label)
        if not match:
            raise ParseError(f"row label {label!r} is not of the form 2^n", line)
        n = int(match.group(1))
        if n != len(rows):
            raise ParseError(f"expected row 2^{len(rows)}, found {label}", line)
        values = fields[1:]
        while values and not values[-1].strip():
            values.pop()
        if len(values) != n + 1:
            raise ParseError(
                f"row {label} has {len(values)} counts, expected {n + 1}", line
            )
        counts = tuple(_parse_count(v, line) for v in values)
        rows.append(DistributionRow(n, counts))
    if not rows:
        raise ParseError("no rows found")
    return Triangle(len(rows) - 1, tuple(rows))


def _import_json(text: str) -> Triangle:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_VERSION:
        raise ParseError(f"expected a JSON object with schema {SCHEMA_VERSION}")
    raw_rows = payload.get("rows")
    if not isinstance(raw_rows, list) or not raw_rows:
        raise ParseError("missing rows array")
    rows = []
    for n, raw in enumerate(raw_rows):
        if not isinstance(raw, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in raw
        ):
            raise ParseError(f"row 2^{n} is not an array of integers")
        if len(raw) != n + 1:
            raise ParseError(f"row 2^{n} has {len(raw)} counts, expected {n + 1}")
        rows.append(DistributionRow(n, tuple(raw)))
    declared = payload.get("max_exponent", len(rows) - 1)
    if declared != len(rows) - 1:
        raise IntegrityError(
            f"max_exponent {declared} disagrees with {len(rows)} rows"
        )
    meta = payload.get("meta") or {}
    return Triangle(
        len(rows) - 1,
        tuple(rows),
        TriangleMeta(meta.get("built_at"), meta.get("version"), meta.get("segment_size")),
    )


def import_triangle(text: str, format: str = "tsv") -> Triangle:
    """Parse text produced by :func:`export_triangle`; every invariant is
    re-checked and a violation raises rather than being repaired."""
    if format == "json":
        return _import_json(text)
    if format == "tsv":
        return _import_delimited(text, "\t")
    if format == "csv":
        return _import_delimited(text, ",")
    raise UsageError(f"unknown format {format!r}; choose from {', '.join(FORMATS)}")


# -- cache -------------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "omega-triangle"


def cache_path(cache_dir: Path | str, max_exponent: int) -> Path:
    return Path(cache_dir) / f"triangle-{max_exponent}-v{__version__}.json"


def load_cached(cache_dir: Path | str, max_exponent: int) -> Triangle | None:
    """Load the cached triangle for ``max_exponent`` if one exists for this
    tool version.  A corrupt cache raises; it is never silently rebuilt."""
    path = cache_path(cache_dir, max_exponent)
    if not path.exists():
        return None
    t = import_triangle(path.read_text(), "json")
    if t.meta.version != __version__:
        log.info("ignoring cache %s built by version %s", path, t.meta.version)
        return None
    if t.max_exponent != max_exponent:
        raise IntegrityError(f"{path} holds rows up to 2^{t.max_exponent}")
    return t


def store_cached(cache_dir: Path | str, t: Triangle) -> Path:
    path = cache_path(cache_dir, t.max_exponent)
    if path.exists():
        return path  # write-once
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(export_triangle(t, "json"))
    os.replace(tmp, path)
    return path


def get_triangle(
    max_exponent: int,
    *,
    cache_dir: Path | str | None = None,
    use_cache: bool = True,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int | str = 1,
) -> Triangle:
    """Return the triangle up to ``max_exponent``, from cache when possible."""
    if use_cache:
        cache_dir = default_cache_dir() if cache_dir is None else Path(cache_dir)
        cached = load_cached(cache_dir, max_exponent)
        if cached is not None:
            log.debug("loaded triangle 2^%d from cache", max_exponent)
            return cached
    t = build_triangle(max_exponent, segment_size=segment_size, threads=threads)
    if use_cache:
        try:
            store_cached(cache_dir, t)
        except OSError as exc:
            log.warning("could not write triangle cache: %s", exc)
    return t
