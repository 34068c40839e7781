"""
Shared helpers for the solver tests: coloured progress lines, timing,
seeded random node sets, small reference problems and an in-process CLI
runner.
"""
import io
import time
import logging
import functools
from enum import Enum
from typing import List, Tuple

import numpy as np
from colorama import Fore, Style, init

from ..core.solver import IvpProblem, LinearPart

init(autoreset=True)

# Fixed seed so random node sets are reproducible
RANDOM_SEED = 20240917

logger = logging.getLogger("block_ivp.tests")


class TestStatus(Enum):
    __test__ = False

    RUNNING = 'RUNNING'
    SUCCESS = 'SUCCESS'
    FAILED = 'FAILED'
    SKIPPED = 'SKIPPED'
    INFO = 'INFO'


# status -> (colour, marker, log level)
_STATUS_STYLE = {
    TestStatus.RUNNING: (Fore.BLUE + Style.BRIGHT, '▶', logging.INFO),
    TestStatus.SUCCESS: (Fore.GREEN + Style.BRIGHT, '✓', logging.INFO),
    TestStatus.FAILED: (Fore.RED + Style.BRIGHT, '✗', logging.ERROR),
    TestStatus.SKIPPED: (Fore.YELLOW + Style.BRIGHT, '⚠', logging.WARNING),
    TestStatus.INFO: (Fore.CYAN, 'ℹ', logging.INFO),
}

RULE = f"{Fore.MAGENTA}{Style.BRIGHT}{'═' * 72}{Style.RESET_ALL}"
THIN_RULE = f"{Fore.CYAN}{'─' * 72}{Style.RESET_ALL}"


def colorize(status: TestStatus, text: str) -> str:
    """Wrap text in the colour of a status"""
    return f"{_STATUS_STYLE[status][0]}{text}{Style.RESET_ALL}"


def log_test(test_name: str, status: TestStatus, message: str = "", exception: Exception = None) -> None:
    """
    One progress line for a test, e.g. ``✓ Example 1 Error Table: norm 7.1e-05``

    Names given as function names are prettified. A failing exception is
    appended with its error kind when it has one.
    """
    colour, marker, level = _STATUS_STYLE[status]
    label = test_name[5:] if test_name.startswith('test_') else test_name
    label = label.replace('_', ' ').title()

    line = f"{marker} {label}"
    if message:
        line += f": {message}"
    if exception is not None:
        line += f" [{getattr(exception, 'kind', type(exception).__name__)}: {exception}]"
    logger.log(level, f"{colour}{line}{Style.RESET_ALL}")


def log_section(title: str) -> None:
    """Header line for a group of tests"""
    logger.info(THIN_RULE)
    logger.info(colorize(TestStatus.INFO, title))


def timed_test(func):
    """Log the wall time of a test, in milliseconds, whether it passes or fails"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        started = time.perf_counter()
        outcome = TestStatus.FAILED
        try:
            result = func(*args, **kwargs)
            outcome = TestStatus.INFO
            return result
        finally:
            elapsed_ms = 1000.0 * (time.perf_counter() - started)
            verb = 'took' if outcome is TestStatus.INFO else 'failed after'
            logger.log(_STATUS_STYLE[outcome][2], colorize(outcome, f"⌛ {func.__name__} {verb} {elapsed_ms:.1f} ms"))
    return wrapper


def random_node_sets(count: int, max_points: int, min_gap: float = 0.02, low: float = -1.0,
                     high: float = 1.0, seed: int = RANDOM_SEED) -> List[np.ndarray]:
    """
    Random strictly increasing node sets with 2..max_points nodes in [low, high]

    Sets with two nodes closer than min_gap are resampled so they stay well conditioned.
    """
    rng = np.random.default_rng(seed)
    sets = []
    while len(sets) < count:
        size = int(rng.integers(2, max_points + 1))
        nodes = np.sort(rng.uniform(low, high, size))
        if np.min(np.diff(nodes)) < min_gap:
            continue
        sets.append(nodes)
    return sets


def scalar_linear_problem(rate: float, domain: Tuple[float, float] = (0.0, 1.0), initial: float = 1.0,
                          with_linear_part: bool = True, name: str = "decay") -> IvpProblem:
    """x' = rate * x with closed form initial * exp(rate * (t - a))"""
    a = domain[0]
    return IvpProblem(
        dimension=1,
        rhs=lambda x, t: rate * x,
        domain=domain,
        initial=[initial],
        jacobian=lambda x, t: np.array([[rate]]),
        exact=lambda t: np.array([initial * np.exp(rate * (t - a))]),
        linear_part=LinearPart(np.array([[rate]]), lambda t: np.zeros(1)) if with_linear_part else None,
        name=name,
    )


def run_cli(argv: List[str]) -> Tuple[int, str, str]:
    """
    Run the command-line entry point with captured streams

    Returns:
        Tuple of (exit_code, stdout_text, stderr_text)
    """
    from ..cli import main

    stdout, stderr = io.StringIO(), io.StringIO()
    code = main(argv, stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()
