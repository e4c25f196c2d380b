import logging
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Any, Dict, List, Optional

from fracab.config import PARAMETER_TYPES, build_run_spec
from fracab.errors import Error
from fracab.experiments import run as run_experiment
from fracab.experiments import write_table
from fracab.schema import Command, RunSpec
from fracab.version import __version__

logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger("fracab").setLevel(level)


def report_error(error: Exception):
    message = " ".join(str(error).split())
    print(f"error: {type(error).__name__}: {message}", file=sys.stderr)


def run(spec: RunSpec) -> int:
    """Execute a run specification and emit its CSV to spec.output_path or stdout.
    :return: 0 on success, 1 if the run failed with a library error.
    """
    try:
        table = run_experiment(spec)
        timestamp = not spec.parameters.get("no_timestamp", False)
        text = write_table(table, spec.output_path, timestamp)
    except Error as e:
        report_error(e)
        return 1
    if spec.output_path is None:
        sys.stdout.write(text)
    return 0


def add_common_arguments(parser: ArgumentParser):
    parser.add_argument(
        "--kind",
        help="Kernel: caputo, cf or abc (tables and figures also accept 'all')",
    )
    parser.add_argument("--alpha", help="Fractional order in (0, 1]")
    parser.add_argument("--h", help="Step size of scalar runs")
    parser.add_argument("--T", help="Final time")
    parser.add_argument("--dt", help="Time step of Fisher runs")
    parser.add_argument("--dx", help="Grid spacing of solve-fisher, N = round(L/dx)")
    parser.add_argument("--delta", help="Diffusion coefficient")
    parser.add_argument("--tau", help="Time exponent of the manufactured solution")
    parser.add_argument("--L", help="Domain length")
    parser.add_argument("--N", help="Number of grid intervals")
    parser.add_argument(
        "--M", help="Derivative bound of bound-check (default: the problem's own)"
    )
    parser.add_argument("--forcing", help="Fisher forcing: literal or consistent")
    parser.add_argument("--norm", help="Normalization variant: unit or gammablend")
    parser.add_argument("--seed", help="Bootstrap: euler or exact")
    parser.add_argument(
        "--problem", "--rhs", dest="problem", help="Built-in problem name"
    )
    parser.add_argument("--levels", help="Number of step halvings (convergence)")
    parser.add_argument("--substeps", help="Reference oracle substeps per step")
    parser.add_argument("--points", help="Sample count per axis (discrepancy)")
    parser.add_argument(
        "--paper-literal",
        action="store_true",
        default=None,
        help="Use the formulas exactly as printed in the original derivation",
    )
    parser.add_argument(
        "--no-timestamp",
        action="store_true",
        default=None,
        help="Omit the '# generated:' header line",
    )
    parser.add_argument(
        "--no-timing",
        action="store_true",
        default=None,
        help="Omit the cpu_seconds columns (table2)",
    )
    parser.add_argument("--out", help="Output CSV path (default: stdout)")
    parser.add_argument(
        "--config", type=Path, default=None, help="key = value parameter file"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase log verbosity (repeatable)",
    )


def create_argument_parser():
    parser = ArgumentParser(
        description="Fractional Adams-Bashforth experiment runner"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub_parsers = parser.add_subparsers(
        description="Command", dest="mode", required=True
    )
    for command in Command:
        add_common_arguments(sub_parsers.add_parser(command.value))
    return parser


def flags_from_args(args: Namespace) -> Dict[str, Any]:
    return {key: getattr(args, key, None) for key in PARAMETER_TYPES}


def main(argv: Optional[List[str]] = None) -> int:
    args = create_argument_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        spec = build_run_spec(Command(args.mode), flags_from_args(args), args.config)
    except Error as e:
        report_error(e)
        return 1
    logger.debug(f"resolved run spec: {spec.model_dump_json()}")
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
