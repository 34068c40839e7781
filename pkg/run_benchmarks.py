#!/usr/bin/env python3
"""
Reproduce every benchmark table in one go and optionally run the test suite first
"""
import os
import sys
import argparse
import logging
from datetime import datetime

# Add the src directory to the path if not already there
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))

from block_ivp.api import get_benchmark_service
from block_ivp.errors import BlockIvpError
from block_ivp.reporting import render_run, write_csv
from block_ivp.utils.logging.logging_utils import setup_logging, get_logger
from block_ivp.validation import RunRequest


def generate_log_filename():
    """Generate a unique log filename with timestamp"""
    logs_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'logs')
    os.makedirs(logs_dir, exist_ok=True)

    current_time = datetime.now()
    date_str = current_time.strftime("%Y-%m-%d")
    timestamp = current_time.strftime("%H-%M-%S")
    return os.path.join(logs_dir, f"BlockIVP_{date_str}_{timestamp}.log")


def run_all_benchmarks(logger, points, csv_dir=None):
    """
    Run every registered benchmark with its default block layout

    Returns:
        int: Number of failed benchmarks
    """
    service = get_benchmark_service()
    failures = 0
    for name in service.names():
        try:
            result = service.run(RunRequest.with_defaults(name, points=points))
        except BlockIvpError as e:
            logger.error(f"{name} failed: {e}")
            failures += 1
            continue

        sys.stdout.write(render_run(result) + '\n')
        if csv_dir:
            os.makedirs(csv_dir, exist_ok=True)
            path = os.path.join(csv_dir, f"{name}.csv")
            with open(path, 'w', encoding='utf-8', newline='') as f:
                write_csv(result, f)
            logger.info(f"Wrote {path}")
    return failures


def main():
    """Run the test suite (optional) and then every benchmark"""
    parser = argparse.ArgumentParser(description='Reproduce all block solver benchmark tables')
    parser.add_argument('--points', type=int, default=int(os.getenv('BLOCK_IVP_POINTS', 5)),
                        help='Nodes per block N (default: 5)')
    parser.add_argument('--csv-dir', type=str, default=None, help='Also write one CSV per benchmark here')
    parser.add_argument('--run-tests', action='store_true', help='Run the test suite before the benchmarks')
    parser.add_argument('--verbose', action='store_true', help='Show INFO level logs in the console')
    parser.add_argument('--no-colors', action='store_true', help='Disable colored output in console')
    args = parser.parse_args()

    log_file = generate_log_filename()
    console_level = logging.INFO if args.verbose else logging.WARNING
    setup_logging(console_level=console_level, log_file=log_file, use_colors=not args.no_colors)
    logger = get_logger("block_ivp")

    logger.info(f"Started benchmark reproduction - {datetime.now().isoformat()}")
    logger.info(f"Logging to: {log_file}")

    if args.run_tests:
        from block_ivp.tests.test_runner import run_all_tests
        with logger.group("Test Suite"):
            results = run_all_tests()
        if results['failed']:
            logger.error(f"{results['failed']} of {results['total']} tests failed; skipping benchmarks")
            return 1

    with logger.group("Benchmark Reproduction"):
        failures = run_all_benchmarks(logger, args.points, args.csv_dir)
    return 3 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
