"""
Command-line front end: size, coverage, candidates and verify.

Result documents go to stdout; logs and error documents go to stderr.
Exit codes: 0 success, 2 invalid input, 3 infeasible or unreachable,
4 verification failures.
"""

import json
import os
import sys
import time
from fractions import Fraction
from typing import List, NoReturn, Optional

import click

from src.cli.formatting import (
    FORMATS,
    RATIONAL,
    decimal12,
    pq,
    render_document,
    render_fields,
    render_table,
)
from src.cli.schemas import (
    SCHEMA_VERSION,
    CandidateRecord,
    CoverageRecord,
    CoverageRow,
    ErrorBody,
    ErrorRecord,
    RequestEcho,
    SizeRecord,
)
from src.engine.candidates import candidate_set_for, describe_fallback
from src.engine.coverage import (
    CriterionKind,
    ErrorCriterion,
    PopulationFrame,
    acceptance_window,
    coverage,
)
from src.engine.errors import (
    InfeasibleCriterionError,
    SampleSizeError,
    UnreachableSampleSizeError,
)
from src.engine.sizing import SearchMode, SizingRequest, search_with_trace
from src.oracle.verification import TIERS, run_verification
from src.utils.logging_config import get_logger, run_context, setup_application_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFICATION_FAILED = 4

_CRITERIA = {
    "abs": CriterionKind.ABSOLUTE,
    "rel": CriterionKind.RELATIVE,
    "mixed": CriterionKind.MIXED,
}


def _fail(error: SampleSizeError, exit_code: int) -> NoReturn:
    record = ErrorRecord(
        error=ErrorBody(code=error.code, message=error.message, details=error.details)
    )
    click.echo(render_document(record.model_dump()), err=True)
    sys.exit(exit_code)


def _invalid(message: str) -> NoReturn:
    record = ErrorRecord(error=ErrorBody(code="invalid_input", message=message))
    click.echo(render_document(record.model_dump()), err=True)
    sys.exit(EXIT_INVALID)


def _frame(N: int, lower: int, upper: Optional[int]) -> PopulationFrame:
    U = N if upper is None else upper
    if N < 1:
        raise click.BadParameter("population size must be at least 1", param_hint="'--population'")
    if not 0 <= lower <= N:
        raise click.BadParameter(f"must lie in [0, {N}]", param_hint="'--lower'")
    if not lower <= U <= N:
        raise click.BadParameter(f"must lie in [{lower}, {N}]", param_hint="'--upper'")
    return PopulationFrame(N=N, L=lower, U=U)


def _criterion(
    name: str, eps: Optional[Fraction], eps_abs: Optional[Fraction], eps_rel: Optional[Fraction]
) -> ErrorCriterion:
    kind = _CRITERIA[name]
    if kind is CriterionKind.MIXED:
        if eps_abs is None:
            raise click.BadParameter("required for --criterion mixed", param_hint="'--eps-abs'")
        if eps_rel is None:
            raise click.BadParameter("required for --criterion mixed", param_hint="'--eps-rel'")
        return ErrorCriterion.mixed(eps_abs, eps_rel)
    if eps is None:
        raise click.BadParameter(f"required for --criterion {name}", param_hint="'--eps'")
    return ErrorCriterion(kind=kind, eps=eps)


def _sample(n: int, N: int) -> int:
    if not 1 <= n <= N:
        raise click.BadParameter(f"must lie in [1, {N}]", param_hint="'--sample'")
    return n


def criterion_options(command):
    """Shared --criterion/--eps/--eps-abs/--eps-rel flags."""
    for option in reversed(
        [
            click.option(
                "--criterion",
                type=click.Choice(list(_CRITERIA)),
                required=True,
                help="Error criterion",
            ),
            click.option("--eps", type=RATIONAL, help="Radius for abs and rel, p/q or decimal"),
            click.option("--eps-abs", "eps_abs", type=RATIONAL, help="Absolute radius for mixed"),
            click.option("--eps-rel", "eps_rel", type=RATIONAL, help="Relative radius for mixed"),
        ]
    ):
        command = option(command)
    return command


def frame_options(command):
    """Shared --population/--lower/--upper flags."""
    command = click.option("--upper", type=int, default=None, help="Upper end U (default N)")(
        command
    )
    command = click.option("--lower", type=int, default=0, show_default=True, help="Lower end L")(
        command
    )
    return click.option("--population", "N", type=int, required=True, help="Population size N")(
        command
    )


def format_option(command):
    return click.option(
        "--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True
    )(command)


def threads_option(command):
    return click.option(
        "--threads", type=click.IntRange(min=0), default=None, help="Worker threads, 0 = all cores"
    )(command)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Override LOG_LEVEL for this run",
)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]):
    """Exact minimum sample sizes for estimating a finite-population proportion."""
    if log_level:
        os.environ["LOG_LEVEL"] = log_level.upper()
    run_id = ctx.with_resource(run_context())
    setup_application_logging()
    logger.debug("Command started", extra={"event": "cli_start", "run_id": run_id})


@cli.command()
@frame_options
@criterion_options
@click.option("--delta", type=RATIONAL, required=True, help="Risk; coverage must exceed 1 - delta")
@click.option(
    "--search",
    type=click.Choice([m.value for m in SearchMode]),
    default=None,
    help="Search mode (default from SAMPLESIZE_SEARCH)",
)
@threads_option
@format_option
@click.option("--trace", is_flag=True, help="Include one record per evaluated n")
@click.option("--fast-path/--no-fast-path", default=None, help="Log-space pre-screen")
@click.option("--no-symmetry", is_flag=True, help="Disable the M -> N - M reduction")
def size(
    N,
    lower,
    upper,
    criterion,
    eps,
    eps_abs,
    eps_rel,
    delta,
    search,
    threads,
    fmt,
    trace,
    fast_path,
    no_symmetry,
):
    """Minimum sample size n with coverage above 1 - delta for every M in [L, U]."""
    frame = _frame(N, lower, upper)
    crit = _criterion(criterion, eps, eps_abs, eps_rel)
    fields = {"frame": frame, "criterion": crit, "delta": delta}
    if search is not None:
        fields["search_mode"] = SearchMode(search)
    try:
        req = SizingRequest(**fields)
    except ValueError as e:
        _invalid(str(e))

    start = time.time()
    try:
        result, records = search_with_trace(
            req, threads=threads, fast_path=fast_path, symmetry=not no_symmetry
        )
    except (InfeasibleCriterionError, UnreachableSampleSizeError) as e:
        _fail(e, EXIT_INFEASIBLE)

    record = SizeRecord.build(
        RequestEcho.of(frame, crit, delta=pq(delta), search_mode=req.search_mode.value),
        result,
        frame,
        absolute=crit.kind is CriterionKind.ABSOLUTE,
        elapsed=time.time() - start,
        trace=records if trace else None,
    )
    document = record.model_dump()
    if fmt == "json":
        click.echo(render_document(document))
        return
    rows = document["trace"] or []
    summary = {**document["result"], "min_coverage": record.result.min_coverage.exact}
    if fmt == "csv":
        click.echo(render_table(rows if trace else [summary], "csv"))
        return
    summary["min_coverage_decimal"] = record.result.min_coverage.decimal
    summary["elapsed_seconds"] = record.timing["elapsed_seconds"]
    click.echo(render_fields(summary))
    if trace:
        click.echo(render_table(rows, "human"))


@cli.command(name="coverage")
@frame_options
@click.option("--sample", "n", type=int, required=True, help="Sample size n")
@criterion_options
@click.option("--m", "m_values", type=int, multiple=True, help="Attribute count M (repeatable)")
@format_option
def coverage_command(N, lower, upper, n, criterion, eps, eps_abs, eps_rel, m_values, fmt):
    """Exact coverage for each M; every M in [L, U] when --m is absent."""
    frame = _frame(N, lower, upper)
    n = _sample(n, N)
    crit = _criterion(criterion, eps, eps_abs, eps_rel)
    for M in m_values:
        if not 0 <= M <= N:
            raise click.BadParameter(f"{M} must lie in [0, {N}]", param_hint="'--m'")
    targets: List[int] = list(m_values) or list(range(frame.L, frame.U + 1))

    rows = []
    for M in targets:
        window = acceptance_window(n, M, N, crit)
        value = coverage(n, M, N, crit)
        rows.append(
            CoverageRow(
                M=M,
                g=window.g,
                h=window.h,
                coverage=pq(value),
                coverage_decimal=decimal12(value),
            )
        )
    record = CoverageRecord(request=RequestEcho.of(frame, crit, n=n), rows=rows)
    if fmt == "json":
        click.echo(render_document(record.model_dump()))
    else:
        click.echo(render_table([r.model_dump() for r in rows], fmt))


@cli.command()
@frame_options
@click.option("--sample", "n", type=int, required=True, help="Sample size n")
@criterion_options
@format_option
def candidates(N, lower, upper, n, criterion, eps, eps_abs, eps_rel, fmt):
    """Candidate M values where the minimum coverage over [L, U] is attained."""
    frame = _frame(N, lower, upper)
    n = _sample(n, N)
    crit = _criterion(criterion, eps, eps_abs, eps_rel)
    members = candidate_set_for(frame, n, crit)
    reason = describe_fallback(frame, crit)
    if reason is not None:
        logger.warning(
            "Mixed breakpoint precondition fails, reporting a substitute set",
            extra={"event": "candidates_fallback", "rule": members.rule.value, "reason": reason},
        )
    record = CandidateRecord.build(RequestEcho.of(frame, crit, n=n), members, reason)
    if fmt == "json":
        click.echo(render_document(record.model_dump()))
        return
    rows = [m.model_dump() for m in record.members]
    if fmt == "human":
        click.echo(
            render_fields(
                {
                    "rule": record.rule,
                    "fallback": record.fallback,
                    "size": record.size,
                    "bound": f"{record.bound.exact} ({record.bound.decimal})",
                }
            )
        )
    click.echo(render_table(rows, fmt))


@cli.command()
@click.option("--tier", type=click.Choice(TIERS), default="fast", show_default=True)
@click.option(
    "--seed", type=click.IntRange(min=0), default=None, help="Default SAMPLESIZE_VERIFY_SEED"
)
@threads_option
@click.option(
    "--max-population", type=click.IntRange(min=2), default=None, help="Cap N in every grid"
)
@click.option(
    "--lines",
    "lines_path",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Write one JSON line per checked instance",
)
@format_option
def verify(tier, seed, threads, max_population, lines_path, fmt):
    """Check the engine against full scans, identities and simulation."""
    report = run_verification(
        tier=tier,
        seed=seed,
        threads=threads,
        max_population=max_population,
        collect_lines=lines_path is not None,
    )
    if lines_path is not None:
        with open(lines_path, "w", encoding="utf-8") as handle:
            for line in report.lines:
                handle.write(json.dumps(line, default=str) + "\n")

    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        **report.summary(include_elapsed=False),
    }
    if fmt == "json":
        click.echo(render_document(document))
    else:
        rows = [s.model_dump() for s in report.suites]
        if fmt == "human":
            click.echo(
                render_fields(
                    {
                        "passed": report.passed,
                        "instances_checked": report.instances_checked,
                        "failures": len(report.failures),
                        "candidate_evaluations": report.candidate_evaluations,
                        "full_scan_evaluations": report.full_scan_evaluations,
                        "elapsed_seconds": round(report.elapsed, 3),
                    }
                )
            )
        click.echo(render_table(rows, fmt))
    if not report.passed:
        sys.exit(EXIT_VERIFICATION_FAILED)


def main():
    cli(prog_name="exact-sample-size")


__all__ = ["cli", "main"]
