"""Command-line interface.

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 success, 2 usage
error, 3 integrity failure, 4 resource exhaustion.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__
from .analytics import (
    column_diffs,
    diff_tail_stats,
    entropy_report,
    max_column,
    max_column_transitions,
)
from .errors import IntegrityError, ResourceExhaustedError, UsageError
from .omega_sieve import DEFAULT_SEGMENT_SIZE, MIN_SEGMENT_SIZE, count_dimensions
from .oracle import row_by_bruteforce
from .tail_series import tail_series
from .triangle import (
    FORMATS,
    build_triangle,
    default_cache_dir,
    export_triangle,
    get_triangle,
    load_cached,
)

EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_RESOURCE = 4
PUBLISHED_MAX_EXPONENT = 23
VERIFY_ORACLE_MAX = 16
VERIFY_TAIL_MAX = 8

log = logging.getLogger("omega_triangle")


@dataclass(frozen=True)
class CliConfig:
    max_exponent: int
    format: str
    cache_dir: Path | None
    segment_size: int
    threads: int | str
    use_cache: bool = True

    def __post_init__(self):
        if self.max_exponent < 0:
            raise UsageError(f"--max-exp must be >= 0, got {self.max_exponent}")
        if self.segment_size < MIN_SEGMENT_SIZE:
            raise UsageError(
                f"--segment-size must be >= {MIN_SEGMENT_SIZE}, got {self.segment_size}"
            )
        if self.threads != "auto" and (
            not isinstance(self.threads, int) or self.threads < 1
        ):
            raise UsageError("--threads must be a positive integer or 'auto'")

    def triangle(self):
        return get_triangle(
            self.max_exponent,
            cache_dir=self.cache_dir,
            use_cache=self.use_cache,
            segment_size=self.segment_size,
            threads=self.threads,
        )


def _parse_threads(ctx, param, value):
    if value == "auto":
        return value
    try:
        return int(value)
    except ValueError:
        raise click.BadParameter("expected a positive integer or 'auto'") from None


def _common_options(default_format="tsv"):
    def decorate(fn):
        options = [
            click.option("--max-exp", "max_exponent", type=int, default=PUBLISHED_MAX_EXPONENT,
                         show_default=True, help="Largest space exponent N (rows 2^0..2^N)."),
            click.option("--format", "fmt", type=click.Choice(FORMATS),
                         default=default_format, show_default=True),
            click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path),
                         default=None, help="Triangle cache directory "
                         "(default: $OMEGA_TRIANGLE_CACHE or ~/.cache/omega-triangle)."),
            click.option("--no-cache", is_flag=True, help="Neither read nor write the cache."),
            click.option("--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE,
                         show_default=True, help="Integers per sieve segment."),
            click.option("--threads", default="1", show_default=True,
                         callback=_parse_threads, help="Worker threads, or 'auto'."),
        ]
        for option in reversed(options):
            fn = option(fn)

        @functools.wraps(fn)
        def wrapper(max_exponent, fmt, cache_dir, no_cache, segment_size, threads, **kw):
            config = CliConfig(
                max_exponent, fmt, cache_dir, segment_size, threads, use_cache=not no_cache
            )
            return fn(config, **kw)

        return wrapper

    return decorate


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


class _Group(click.Group):
    """Maps package errors onto the exit-code contract."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except UsageError as exc:
            _fail(EXIT_USAGE, str(exc))
        except IntegrityError as exc:
            _fail(EXIT_INTEGRITY, str(exc))
        except ResourceExhaustedError as exc:
            _fail(EXIT_RESOURCE, str(exc))
        except MemoryError:
            _fail(EXIT_RESOURCE, "resource exhaustion")


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _table(fmt: str, header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload))


@click.group(cls=_Group)
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Distribution of integers in [1, 2^n] by number of prime factors."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command("triangle")
@_common_options()
def cmd_triangle(config: CliConfig):
    """Emit the triangle of dimension counts for rows 2^0..2^N."""
    click.echo(export_triangle(config.triangle(), config.format), nl=False)


@main.command("tail")
@click.option("--x", "x", type=int, required=True, help="Diagonal offset (column n - x).")
@click.option("--witnesses", is_flag=True, help="List the (j, q) odd-part witnesses.")
@_common_options()
def cmd_tail(config: CliConfig, x: int, witnesses: bool):
    """Diagonal values, exact limit and convergence exponent for offset x."""
    if x < 0:
        raise UsageError(f"--x must be >= 0, got {x}")
    t = config.triangle()
    if x > t.max_exponent - 1:
        raise UsageError(f"--x {x} needs --max-exp of at least {x + 1}")
    series = tail_series(t, x)
    n_star = series.convergence_exponent
    if n_star <= t.max_exponent:
        settled = [c for n, c in series.values if n >= n_star]
        if any(c != series.limit for c in settled):
            raise IntegrityError(
                f"diagonal x={x} does not settle on {series.limit} from 2^{n_star}"
            )
        status = "confirmed"
    elif t.max_exponent <= PUBLISHED_MAX_EXPONENT:
        status = f"unconfirmed within 2^{PUBLISHED_MAX_EXPONENT}"
    else:
        status = f"unconfirmed by triangle to 2^{t.max_exponent}"

    if config.format == "json":
        payload = {
            "x": x,
            "limit": series.limit,
            "convergence_exponent": n_star,
            "status": status,
            "values": [list(v) for v in series.values],
        }
        if witnesses:
            payload["witnesses"] = [list(w) for w in series.witnesses]
        _emit_json(payload)
        return
    out = _table(
        config.format,
        ["key", "value"],
        [("x", x), ("limit", series.limit), ("convergence_exponent", n_star),
         ("status", status)],
    )
    out += "\n" + _table(config.format, ["n", "count"], series.values)
    if witnesses:
        out += "\n" + _table(config.format, ["j", "q"], series.witnesses)
    click.echo(out, nl=False)


@main.command("entropy")
@_common_options()
def cmd_entropy(config: CliConfig):
    """Entropy of each triangle row next to the same row of Pascal's triangle."""
    report = entropy_report(config.triangle())
    if config.format == "json":
        _emit_json(
            {"entries": [
                {"n": e.exponent, "s_dim": e.s_dim, "s_pascal": e.s_pascal}
                for e in report.entries
            ]}
        )
        return
    rows = [(e.exponent, _fmt(e.s_dim), _fmt(e.s_pascal)) for e in report.entries]
    click.echo(_table(config.format, ["n", "s_dim", "s_pascal"], rows), nl=False)


@main.command("diffs")
@click.option("--x", "x", type=int, required=True, help="Column (dimension) index.")
@click.option("--window", type=int, default=None,
              help="Also report mean/stddev of the last W differences.")
@_common_options()
def cmd_diffs(config: CliConfig, x: int, window: int | None):
    """Natural-log counts down one column and their neighbor differences."""
    series = column_diffs(config.triangle(), x)
    stats = diff_tail_stats(series, window) if window is not None else None
    if config.format == "json":
        payload = {
            "column": x,
            "entries": [
                {"n": e.exponent, "ln_count": e.ln_count, "diff": e.diff}
                for e in series.entries
            ],
        }
        if stats:
            payload["tail_stats"] = {"window": window, "mean": stats[0], "stddev": stats[1]}
        _emit_json(payload)
        return
    rows = [(e.exponent, _fmt(e.ln_count), _fmt(e.diff)) for e in series.entries]
    out = _table(config.format, ["n", "ln_count", "diff"], rows)
    if stats:
        out += "\n" + _table(
            config.format, ["window", "mean", "stddev"], [(window, _fmt(stats[0]), _fmt(stats[1]))]
        )
    click.echo(out, nl=False)


@main.command("maxcol")
@_common_options()
def cmd_maxcol(config: CliConfig):
    """Rows where the largest column moves; tied rows are listed separately."""
    t = config.triangle()
    transitions = max_column_transitions(t)
    per_row = [(row.exponent, *max_column(row, 1)) for row in t.rows[1:]]
    if config.format == "json":
        _emit_json(
            {
                "transitions": [{"n": n, "max_column": c} for n, c in transitions],
                "rows": [{"n": n, "max_column": c, "tied": tied} for n, c, tied in per_row],
            }
        )
        return
    out = _table(config.format, ["n", "max_column"], transitions)
    ties = [(n, c) for n, c, tied in per_row if tied]
    out += "\n" + _table(config.format, ["tied_n", "max_column"], ties)
    click.echo(out, nl=False)


@main.command("verify")
@_common_options()
def cmd_verify(config: CliConfig):
    """Cross-check sieve, oracle, cache and tail limits; exit 0 only if all pass."""
    N = config.max_exponent
    failures = 0

    def report(ok: bool, what: str):
        nonlocal failures
        failures += not ok
        click.echo(f"{'ok' if ok else 'FAIL'}\t{what}")

    started = time.perf_counter()
    if config.use_cache:
        # a corrupt cache raises IntegrityError here and exits 3
        cache_dir = config.cache_dir or default_cache_dir()
        cached = load_cached(cache_dir, N)
    else:
        cached = None
    t = build_triangle(N, segment_size=config.segment_size, threads=config.threads)
    if cached is not None:
        report(cached == t, f"cached triangle to 2^{N} matches a fresh build")

    for n in range(min(N, VERIFY_ORACLE_MAX) + 1):
        oracle = row_by_bruteforce(n)
        report(oracle == t.rows[n], f"row 2^{n}: sieve equals trial division")
    direct = count_dimensions(min(N, VERIFY_ORACLE_MAX), segment_size=config.segment_size)
    report(direct == t.rows[min(N, VERIFY_ORACLE_MAX)],
           f"row 2^{min(N, VERIFY_ORACLE_MAX)}: incremental equals monolithic")
    for row in t.rows:
        report(sum(row.counts) == 1 << row.exponent, f"row 2^{row.exponent}: sum is 2^{row.exponent}")
    for x in range(min(VERIFY_TAIL_MAX, N - 1) + 1):
        series = tail_series(t, x)
        settled = [c for n, c in series.values if n >= series.convergence_exponent]
        if settled:
            report(all(c == series.limit for c in settled),
                   f"diagonal x={x}: settles on {series.limit} from 2^{series.convergence_exponent}")
    log.debug("verify finished in %.3fs", time.perf_counter() - started)
    if failures:
        click.echo(f"{failures} check(s) failed", err=True)
        sys.exit(EXIT_INTEGRITY)


if __name__ == "__main__":
    main()
