"""
Main entry point for giuga-half.

    python -m src.main check 2021
    python -m src.main range 3 15 --format csv
    python -m src.main density exact --eps 0.00082
    python -m src.main density empirical --limit 1000000 --checkpoints 10000,100000
    python -m src.main density series --prime-bound 7
    python -m src.main validate --limit 10000

Exit codes: 0 success, 1 validation mismatch, 2 usage or domain error, 3 resource limit
(factorization timeout or unsettled truncation).
"""

import functools
import json
import sys
from typing import Optional

import click
from loguru import logger

from src.core.config import load_settings
from src.core.exceptions import (
    ConfigurationError,
    FactorizationTimeout,
    GiugaHalfError,
    OracleMismatchError,
    TruncationError,
)
from src.core.state import EngineSettings
from src.engines.density import density_interval, series_partial_sum
from src.engines.membership import Classifier
from src.engines.sieve import ComplementSieve, cross_validate
from src.utils import parse_integer_expression, parse_rational, records_frame

EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """Configure logging with loguru. stdout is reserved for command output."""
    logger.remove()
    logger.add(sys.stderr, level=level)
    if log_file:
        logger.add(log_file, rotation="1 day", retention="7 days", level="DEBUG")
    logger.debug("Logging initialized")


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def handle_errors(command):
    """Map library exceptions onto exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (FactorizationTimeout, TruncationError) as exc:
            _fail(str(exc), EXIT_TIMEOUT)
        except OracleMismatchError as exc:
            _fail(str(exc), EXIT_MISMATCH)
        except (GiugaHalfError, ValueError) as exc:
            _fail(str(exc), EXIT_USAGE)

    return wrapper


def _settings() -> EngineSettings:
    return click.get_current_context().obj


@click.group()
@click.version_option(version="0.1.0", prog_name="giuga-half")
@click.pass_context
def cli(ctx: click.Context):
    """Membership and density of the odd n with sum j^((n-1)/2) = 0 (mod n)."""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    try:
        settings = load_settings()
    except ConfigurationError as exc:
        _fail(str(exc), EXIT_USAGE)
    setup_logging(settings.log_level, settings.log_file)
    ctx.obj = settings


@cli.command()
@click.argument("n")
@click.option("--oracle", is_flag=True, help="Also compute G(n) mod n (n <= 10^6)")
@click.option("--json", "output_json", is_flag=True, help="Output as JSON")
@handle_errors
def check(n: str, oracle: bool, output_json: bool):
    """Classify one odd n (digits, 2^m+1 or p^k)."""
    settings = _settings()
    value, hint = parse_integer_expression(n, timeout=settings.factor_timeout)
    record = Classifier(settings).classify(value, factorization=hint, oracle=oracle)
    if output_json:
        click.echo(record.model_dump_json())
        return
    click.echo(f"n: {record.n}")
    click.echo(f"member: {'true' if record.member else 'false'}")
    click.echo(f"witness: {record.witness_prime if record.witness_prime is not None else '-'}")
    click.echo(f"rules: {', '.join(tag.value for tag in record.rules_fired) or '-'}")
    click.echo(f"method: {record.method.value}")
    if record.oracle_residue is not None:
        click.echo(f"G(n) mod n: {record.oracle_residue}")


@cli.command("range")
@click.argument("lo", type=int)
@click.argument("hi", type=int)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--jobs", type=int, default=None, help="Worker processes (default GIUGA_HALF_JOBS)")
@handle_errors
def classify_range(lo: int, hi: int, fmt: str, jobs: Optional[int]):
    """Classify every odd n in [LO, HI], in increasing order."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= LO <= HI")
    if jobs is not None and jobs < 1:
        raise ValueError("--jobs must be >= 1")
    records = Classifier(_settings()).classify_range(lo, hi, jobs=jobs)
    if fmt == "csv":
        click.echo(records_frame(records).to_csv(index=False), nl=False)
        return
    for record in records:
        click.echo(record.model_dump_json())


@cli.group()
def density():
    """Exact, empirical and series density of the member set."""


@density.command()
@click.option("--eps", required=True, help="Tail tolerance, e.g. 0.00082 or 41/50000")
@click.option("--digits", type=int, default=None, help="Decimal digits (default GIUGA_HALF_DIGITS)")
@click.option("--jobs", type=int, default=None)
@click.option("--json", "output_json", is_flag=True, help="Output as JSON")
@handle_errors
def exact(eps: str, digits: Optional[int], jobs: Optional[int], output_json: bool):
    """Rational interval containing the density, of width EPS."""
    settings = _settings()
    epsilon = parse_rational(eps)
    if epsilon <= 0:
        raise ValueError("--eps must be positive")
    report = density_interval(epsilon, digits=digits or settings.digits, jobs=jobs or settings.jobs)
    if output_json:
        click.echo(report.model_dump_json())
        return
    click.echo(f"k: {report.k}")
    if report.primes_used:
        click.echo(f"primes: {report.primes_used[0]}..{report.primes_used[-1]}")
    click.echo(f"union_density: {report.union_density.numerator}/{report.union_density.denominator}")
    click.echo(f"upper: {report.upper.numerator}/{report.upper.denominator}")
    click.echo(f"interval: [{report.decimal_lower}, {report.decimal_upper}]")


@density.command()
@click.option("--limit", required=True, type=int, help="Sieve bound N")
@click.option("--checkpoints", default=None, help="Comma separated N values; prints CSV rows")
@click.option("--jobs", type=int, default=None)
@click.option("--json", "output_json", is_flag=True, help="Output as JSON")
@handle_errors
def empirical(limit: int, checkpoints: Optional[str], jobs: Optional[int], output_json: bool):
    """Member count and density among odd n <= LIMIT."""
    settings = _settings()
    if limit < 3:
        raise ValueError("--limit must be >= 3")
    sieve = ComplementSieve(settings.segment_size, jobs or settings.jobs)
    if checkpoints:
        try:
            points = [int(p.replace("_", "")) for p in checkpoints.split(",") if p.strip()]
        except ValueError:
            raise ValueError(f"bad --checkpoints {checkpoints!r}") from None
        if any(p < 1 or p > limit for p in points):
            raise ValueError("checkpoints must lie in [1, limit]")
        frame = sieve.checkpoints(sorted(set(points) | {limit}), settings.digits)
        click.echo(frame.to_csv(index=False), nl=False)
        return
    result = sieve.result(limit, settings.digits)
    if output_json:
        click.echo(result.model_dump_json())
        return
    click.echo(f"N: {result.limit}")
    click.echo(f"member_count: {result.member_count}")
    click.echo(f"marked_complement_count: {result.marked_complement_count}")
    click.echo(f"density: {result.decimal_density}")


@density.command()
@click.option("--prime-bound", required=True, type=int, help="Use the odd primes below this bound")
@handle_errors
def series(prime_bound: int):
    """Partial sum of (-1)^omega(m) / (2 m lambda(m)) as an exact fraction."""
    total = series_partial_sum(prime_bound)
    click.echo(f"{total.numerator}/{total.denominator}")


@cli.command()
@click.option("--limit", required=True, type=int, help="Largest n checked (<= 10^5)")
@handle_errors
def validate(limit: int):
    """Cross-check oracle, characterization and sieve on every odd n <= LIMIT."""
    report = cross_validate(limit)
    if report.ok:
        logger.success(f"{report.checked} odd integers agree")
        click.echo("OK")
        return
    for mismatch in report.mismatches:
        click.echo(json.dumps(mismatch.model_dump()))
    _fail(f"{len(report.mismatches)} mismatches", EXIT_MISMATCH)


def main():
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
