"""Command-line entry point: ``bftk <command> [options]``."""

import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from .api.commands import COMMANDS
from .core.config import settings
from .core.errors import BftkError
from .models.schemas import ErrorResponse
from .services.approx import DEFAULT_EPSILON
from .utils.report_writer import render, write_report

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bftk",
        description="Complexity measures of Boolean functions and checks of the relations between them.",
    )
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="Report format (default: json).")
    parser.add_argument("--out", default=None, help="Write the report to PATH instead of stdout.")
    parser.add_argument("--jobs", type=int, default=None, help="Worker processes for campaigns.")
    parser.add_argument("--tolerance", type=float, default=None, help="Absolute tolerance of float relations.")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the PCG64 streams.")
    parser.add_argument("--timing", action="store_true", help="Include elapsed time in reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="Compute measures of one function.")
    p.add_argument("--fn", required=True, help="tt:N:HEX, fam:NAME:ARGS, formula:TEXT or graph:NAME:V")
    p.add_argument("--measures", default="", help="Comma-separated measure ids (default: all combinatorial ones).")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="Error for adeg (default: 1/3).")
    p.add_argument("--emit-graph", default=None, metavar="PATH", help="Write the sensitivity graph edge list to PATH.")

    p = sub.add_parser("verify", help="Run a verification campaign.")
    p.add_argument("--n", type=int, default=None, help="Arity of the checked functions.")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="Check every function of arity n (n <= 4).")
    mode.add_argument("--random", type=int, default=None, metavar="COUNT", help="Check COUNT random functions.")
    p.add_argument("--relations", default="all", help="Comma-separated relation ids, or 'all'.")
    p.add_argument("--list-relations", action="store_true", help="Print the relation registry and exit.")

    sub.add_parser("relations", help="Print the relation registry.")

    p = sub.add_parser("gamma2", help="Explicit gamma_2 factorization of M.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--emit-matrix", action="store_true", help="Include S, T and M in the report.")

    p = sub.add_parser("huang", help="Check the signing matrix B_n.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit-matrix", action="store_true", help="Include the rows of B_n in the report.")

    p = sub.add_parser("huang-witness", help="Build the eigenvector witness for deg(f) <= lambda(f)^2.")
    p.add_argument("--fn", required=True)

    p = sub.add_parser("identities", help="Check the Hadamard-basis identities for A_f.")
    p.add_argument("--fn", required=True)

    p = sub.add_parser("compose", help="Check lambda and deg of f o g.")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("parse", help="Parse a read-once formula.")
    p.add_argument("--formula", required=True)
    p.add_argument("--adeg", action="store_true", help="Also compute adeg and check its window.")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)

    p = sub.add_parser("graphprop", help="Measures and checks of a graph property.")
    p.add_argument("--property", required=True)
    p.add_argument("--vertices", type=int, required=True)

    p = sub.add_parser("chain", help="Check the approximate-degree certificate chain.")
    p.add_argument("--fn", required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)

    p = sub.add_parser("adeg", help="Approximate degree with witness and infeasibility certificate.")
    p.add_argument("--fn", required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--convention", choices=("unit", "signed"), default="unit")
    return parser


async def run(args: argparse.Namespace) -> int:
    cfg = settings.override(
        tolerance=args.tolerance, jobs=args.jobs, seed=args.seed, output_format=args.format
    )
    handler = COMMANDS[args.command]
    logger.debug(f"Running '{args.command}' with tolerance={cfg.TOLERANCE}, jobs={cfg.JOBS}, seed={cfg.SEED}")
    try:
        result = await handler(args, cfg)
    except BftkError as exc:
        logger.error(f"{args.command}: {exc}")
        error = ErrorResponse(detail=str(exc), exit_code=exc.exit_code, extra={"type": type(exc).__name__})
        sys.stderr.write(error.model_dump_json() + "\n")
        return exc.exit_code
    except Exception as exc:
        if cfg.DEBUG:
            logger.exception(f"{args.command}: unexpected error")
        else:
            logger.error(f"{args.command}: unexpected error: {exc}")
        error = ErrorResponse(detail=str(exc), exit_code=EXIT_FAIL, extra={"type": type(exc).__name__})
        sys.stderr.write(error.model_dump_json() + "\n")
        return EXIT_FAIL
    await write_report(render(result.report, cfg.OUTPUT_FORMAT, timing=args.timing), args.out)
    if not result.passed:
        logger.error(f"{args.command}: checks failed")
        return EXIT_FAIL
    return EXIT_PASS


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        logger.error("--jobs must be at least 1")
        return EXIT_USAGE
    return asyncio.run(run(args))


if __name__ == "__main__":
    sys.exit(main())
