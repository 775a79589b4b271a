"""Command-line entry point.

Subcommands:
    verify     run a seeded campaign of one theorem's chains
    search     hill-climb toward the smallest chain margin
    spectrum   spherical spectrum of a matrix file
    resolvent  resolvent series of a matrix file at a quaternion q

Reports go to stdout (or --output) as JSON lines; logs go to stderr.
Exit codes: 0 all chains pass, 1 violation found, 2 usage or hypothesis error,
3 numerical failure.
"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence, TextIO

from pydantic import ValidationError

from .campaign import THEOREMS, RunConfig, run_campaign
from .config import Settings
from .errors import QineqError, SpectralComputationError, UsageError
from .models import ChainReport, RunSummary
from .qlinalg import is_selfadjoint, load_matrix, matrix_to_json
from .quaternion import Quaternion
from .search import search
from .spectral import bounds, resolvent_series, spectral_radius, spectrum

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='{"time": "%(asctime)s", "level": "%(levelname)s", "logger": "%(name)s", "message": "%(message)s"}',
        datefmt="%Y-%m-%dT%H:%M:%S%z",
        stream=sys.stderr,
        force=True,
    )


def _interval(text: str) -> tuple[float, float]:
    try:
        m, M = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'm,M', got {text!r}") from None
    return m, M


def build_parser(current: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qineq", description="Quaternionic operator inequality verification")
    commands = parser.add_subparsers(dest="command", required=True)

    def campaign_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--theorem", required=True, help=f"One of: {', '.join(THEOREMS)}")
        sub.add_argument("--dim", type=int, default=None, help="Dimension n (default: drawn from 1, 2, 4, 8)")
        sub.add_argument("--trials", type=int, default=1000)
        sub.add_argument("--seed", type=int, default=0, help="Master seed")
        sub.add_argument("--spectrum", type=_interval, default=None, help="Spectrum bounds 'm,M'")
        sub.add_argument("--function", default=None, help="Function spec, e.g. 'power:r=-1'")
        sub.add_argument("--r", type=float, default=None, help="Exponent for power-type theorems")
        sub.add_argument("--variant", type=int, default=None, help="Chain variant (jensen-gap, kyfan-operator)")
        sub.add_argument("--tol", type=float, default=current.tol)
        sub.add_argument("--format", choices=("json", "text"), default="json")
        sub.add_argument("--output", default=None, help="Write reports here instead of stdout")
        sub.add_argument("--workers", type=int, default=1, help="Parallel trials; output stays in trial order")
        sub.add_argument("--diagnostic", action="store_true", help="Also report the literal-exponent Lah chains")

    verify = commands.add_parser("verify", help="Run a seeded verification campaign")
    campaign_options(verify)

    search_cmd = commands.add_parser("search", help="Search for the smallest chain margin")
    campaign_options(search_cmd)
    search_cmd.add_argument("--budget", type=int, default=200, help="Number of perturbation steps")

    spectrum_cmd = commands.add_parser("spectrum", help="Spherical spectrum of a matrix file")
    spectrum_cmd.add_argument("path", type=Path)

    resolvent = commands.add_parser("resolvent", help="Resolvent series of a matrix file")
    resolvent.add_argument("path", type=Path)
    resolvent.add_argument("--q", type=float, nargs=4, required=True, metavar=("X0", "X1", "X2", "X3"))
    resolvent.add_argument("--rel-tol", type=float, default=1e-12)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        theorem=args.theorem,
        n=args.dim,
        trials=args.trials,
        seed=args.seed,
        tol=args.tol,
        spectrum=args.spectrum,
        function=args.function,
        r=args.r,
        variant=args.variant,
        diagnostic=args.diagnostic,
        workers=args.workers,
        format=args.format,
        output=args.output,
    )


@contextmanager
def _sink(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8") as handle:
        yield handle


def format_report(report: ChainReport, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(by_alias=True)
    verdict = "INVALID" if report.invalid else ("PASS" if report.passed else "FAIL")
    if report.diagnostic:
        verdict += " (diagnostic)"
    chain = " <= ".join(f"{t.value:.12g}" for t in report.terms)
    line = f"{verdict} {report.theorem} trial={report.witness.trial} slack={report.slack:.6g}: {chain}"
    if report.violation:
        line += f" [{report.violation}]"
    return line


def format_summary(summary: RunSummary, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"summary": summary.model_dump()}, separators=(",", ":"))
    return (
        f"{summary.theorem}: {summary.pass_count} pass, {summary.violation_count} violations, "
        f"{summary.invalid_count} invalid of {summary.reports} chains over {summary.trials} trials; "
        f"min slack {summary.min_slack}"
    )


def cmd_verify(args: argparse.Namespace) -> int:
    config = _run_config(args)
    reports, summary = run_campaign(config)
    with _sink(config.output) as out:
        for report in reports:
            print(format_report(report, config.format), file=out)
        print(format_summary(summary, config.format), file=out)
    return EXIT_VIOLATION if summary.violation_count else EXIT_PASS


def cmd_search(args: argparse.Namespace) -> int:
    config = _run_config(args)
    if args.budget < 0:
        raise UsageError(f"budget must be >= 0, got {args.budget}")
    result = search(config, args.budget)
    with _sink(config.output) as out:
        if config.format == "json":
            print(result.model_dump_json(by_alias=True), file=out)
        else:
            flag = " SUSPECTED VIOLATION" if result.suspected_violation else ""
            print(
                f"{result.theorem}: min slack {result.min_slack:.6g}, min margin {result.min_margin:.6g} "
                f"after {result.evaluations} evaluations{flag}",
                file=out,
            )
            print(format_report(result.worst, "text"), file=out)
    return EXIT_VIOLATION if result.suspected_violation else EXIT_PASS


def cmd_spectrum(args: argparse.Namespace) -> int:
    T = load_matrix(args.path)
    sigma = spectrum(T)
    payload = sigma.to_json()
    payload["spectral_radius"] = spectral_radius(T, sigma)
    if is_selfadjoint(T):
        payload.update(bounds(T).model_dump())
    print(json.dumps(payload, separators=(",", ":")))
    return EXIT_PASS


def cmd_resolvent(args: argparse.Namespace) -> int:
    T = load_matrix(args.path)
    result = resolvent_series(T, Quaternion(*args.q), rel_tol=args.rel_tol)
    payload = {
        "matrix": matrix_to_json(result.matrix),
        "terms": result.terms,
        "tail_bound": result.tail_bound,
        "residual": result.residual,
        "direct_error": result.direct_error,
    }
    print(json.dumps(payload, separators=(",", ":")))
    return EXIT_PASS


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "verify": cmd_verify,
    "search": cmd_search,
    "spectrum": cmd_spectrum,
    "resolvent": cmd_resolvent,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Re-read so environment overrides such as QINEQ_TOL apply to this run.
    current = Settings()
    configure_logging(current.log_level)
    parser = build_parser(current)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpectralComputationError as e:
        logger.error(f"Numerical failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QineqError, OSError) as e:
        logger.error(f"Usage error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    """Console script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
