"""
Command-line front end

    block-ivp run example1 --blocks 10 --points 5 --compare exact
    block-ivp order example3 --points 5 --refinements 3
    block-ivp list

Exit codes: 0 success, 1 argument error, 2 unknown problem, 3 solver failure.
"""
import argparse
import logging
import sys

from .api import get_benchmark_service
from .config import get_log_level, get_solver_settings, PACKAGE_VERSION
from .errors import (
    BlockIvpError,
    RequestValidationError,
    InvalidConfigError,
    MissingNodeError,
    MissingReferenceError,
    UnknownProblemError,
)
from .reporting import render_run, render_order, render_list, write_csv
from .utils.logging import setup_logging, get_logger
from .validation import RunRequest, OrderRequest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNKNOWN_PROBLEM = 2
EXIT_SOLVER_FAILURE = 3

_USAGE_ERRORS = (RequestValidationError, InvalidConfigError, MissingNodeError, MissingReferenceError)


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2"""

    def error(self, message):
        raise RequestValidationError(message)


def _exit_code(error):
    if isinstance(error, UnknownProblemError):
        return EXIT_UNKNOWN_PROBLEM
    if isinstance(error, _USAGE_ERRORS):
        return EXIT_USAGE
    return EXIT_SOLVER_FAILURE


def _report_error(error, stderr):
    stderr.write(f"error: {error.kind}: {error}\n")
    stderr.flush()
    return _exit_code(error)


def _emit(text_or_writer, out, stdout):
    """Send rendered output to the --out path, or to stdout"""
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as f:
            if callable(text_or_writer):
                text_or_writer(f)
            else:
                f.write(text_or_writer)
        logger.info(f"Wrote {out}")
    elif callable(text_or_writer):
        text_or_writer(stdout)
    else:
        stdout.write(text_or_writer)


def cmd_run(request, stdout=None, stderr=None):
    """
    Run one benchmark and print its table or CSV

    Args:
        request: RunRequest
        stdout: Output stream (default sys.stdout)
        stderr: Diagnostic stream (default sys.stderr)

    Returns:
        int: Exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        result = get_benchmark_service().run(request)
        if request.output_format == 'csv':
            _emit(lambda stream: write_csv(result, stream), request.out, stdout)
        else:
            _emit(render_run(result), request.out, stdout)
    except BlockIvpError as e:
        return _report_error(e, stderr)
    return EXIT_OK


def cmd_order(problem, points, refinements, blocks=None, oracle_steps=None, workers=1,
              out=None, stdout=None, stderr=None):
    """
    Run a convergence-order study and print step sizes, errors, slopes and the estimated order

    Returns:
        int: Exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        request = OrderRequest(problem=problem, points=points, refinements=refinements,
                               blocks=blocks, oracle_steps=oracle_steps, workers=workers)
        entry, estimate = get_benchmark_service().order(request)
        _emit(render_order(entry, estimate), out, stdout)
    except BlockIvpError as e:
        return _report_error(e, stderr)
    return EXIT_OK


def cmd_list(details=False, stdout=None):
    """Print the registered benchmark names, one per line"""
    stdout = stdout or sys.stdout
    service = get_benchmark_service()
    if details:
        stdout.write(render_list(service.describe()))
    else:
        for name in service.names():
            stdout.write(f"{name}\n")
    return EXIT_OK


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', '-v', action='store_true', help='Log solver progress at DEBUG level')
    common.add_argument('--log-file', type=str, default=None, help='Also write INFO logs to this file')
    common.add_argument('--no-colors', action='store_true', help='Disable colored output in console')
    return common


def _add_problem_arguments(parser):
    parser.add_argument('problem', nargs='?', default=None, help='Benchmark name (see `list`)')
    parser.add_argument('--problem', dest='problem_option', default=None, help='Benchmark name')


def build_parser():
    """Build the argument parser for run / order / list"""
    settings = get_solver_settings()
    common = _common_options()

    parser = _ArgumentParser(
        prog='block-ivp',
        description='Block-implicit collocation solver benchmarks',
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {PACKAGE_VERSION}")
    subparsers = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)

    run = subparsers.add_parser('run', parents=[common], help='Solve a benchmark and report its errors')
    _add_problem_arguments(run)
    run.add_argument('--blocks', type=int, default=None,
                     help="Number of blocks M (default: the problem's reporting grid)")
    run.add_argument('--points', type=int, default=settings['points_per_block'],
                     help=f"Nodes per block N (default: {settings['points_per_block']})")
    run.add_argument('--newton-tol', type=float, default=settings['newton_tol'],
                     help=f"Newton tolerance (default: {settings['newton_tol']:g})")
    run.add_argument('--max-iter', type=int, default=settings['newton_max_iter'],
                     help=f"Newton iteration cap (default: {settings['newton_max_iter']})")
    run.add_argument('--compare', choices=['exact', 'oracle', 'none'], default=None,
                     help='Reference for the errors (default: exact when available, else oracle)')
    run.add_argument('--oracle-steps', type=int, default=None,
                     help='RK4 oracle steps per unit time (default: 1e5 stiff, 1e4 otherwise, at most 2e5 steps in total)')
    run.add_argument('--output', choices=['table', 'csv'], default='table', help='Output format')
    run.add_argument('--out', type=str, default=None, help='Write output to this path instead of stdout')

    order = subparsers.add_parser('order', parents=[common], help='Estimate the convergence order')
    _add_problem_arguments(order)
    order.add_argument('--points', type=int, default=settings['points_per_block'], help='Nodes per block N')
    order.add_argument('--refinements', type=int, default=3, help='Number of runs, block count doubling each time')
    order.add_argument('--blocks', type=int, default=None, help='Block count of the coarsest run')
    order.add_argument('--oracle-steps', type=int, default=None, help='RK4 oracle steps per unit time')
    order.add_argument('--workers', type=int, default=1, help='Run refinements in parallel threads')
    order.add_argument('--out', type=str, default=None, help='Write output to this path instead of stdout')

    listing = subparsers.add_parser('list', parents=[common], help='List the registered benchmarks')
    listing.add_argument('--details', action='store_true', help='Show domain, dimension and published norm')

    return parser


def _problem_name(args):
    if args.problem and args.problem_option and args.problem != args.problem_option:
        raise RequestValidationError(
            f"conflicting problem names {args.problem!r} and --problem {args.problem_option!r}"
        )
    name = args.problem or args.problem_option
    if not name:
        raise RequestValidationError(f"{args.command}: a problem name is required")
    return name


def main(argv=None, stdout=None, stderr=None):
    """
    Entry point of the block-ivp command

    Returns:
        int: Exit code (also used by the console script)
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except RequestValidationError as e:
        parser.print_usage(stderr)
        return _report_error(e, stderr)

    console_level = logging.DEBUG if getattr(args, 'verbose', False) else get_log_level()
    setup_logging(console_level=console_level, log_file=getattr(args, 'log_file', None),
                  use_colors=not getattr(args, 'no_colors', False))
    cli_logger = get_logger("block_ivp.cli")

    if args.command is None:
        parser.print_help(stderr)
        return EXIT_USAGE

    if args.command == 'list':
        return cmd_list(details=args.details, stdout=stdout)

    try:
        problem = _problem_name(args)
        with cli_logger.group(f"block-ivp {args.command} {problem}"):
            if args.command == 'run':
                request = RunRequest(
                    problem=problem,
                    blocks=args.blocks,
                    points=args.points,
                    newton_tol=args.newton_tol,
                    max_iter=args.max_iter,
                    output_format=args.output,
                    compare=args.compare,
                    oracle_steps=args.oracle_steps,
                    out=args.out,
                )
                return cmd_run(request, stdout=stdout, stderr=stderr)
            return cmd_order(problem, args.points, args.refinements, blocks=args.blocks,
                             oracle_steps=args.oracle_steps, workers=args.workers,
                             out=args.out, stdout=stdout, stderr=stderr)
    except BlockIvpError as e:
        return _report_error(e, stderr)


if __name__ == "__main__":
    sys.exit(main())
