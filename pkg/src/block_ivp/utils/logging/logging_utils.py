"""
Logging for solver runs

Console output is coloured by level; a log file, when requested, receives the
same records without escape codes. Messages emitted inside ``logger.group()``
are indented under the group title, so the blocks of one benchmark or the
runs of one order study read as a unit. Group nesting is tracked per thread
because order studies may solve refinements concurrently.
"""
import logging
import numbers
import os
import sys
import threading
import time
from functools import wraps

import colorama
from colorama import Fore, Back, Style

colorama.init(autoreset=True)

LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.WHITE,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT + Back.WHITE,
}

DATE_FORMAT = "%H:%M:%S"
_SHORT_FORMAT = "%(asctime)s.%(msecs)03d %(levelname)-7s %(message)s"
_LONG_FORMAT = "%(asctime)s.%(msecs)03d %(levelname)-7s [%(name)s] %(message)s"

_nesting = threading.local()


def _depth():
    return getattr(_nesting, 'depth', 0)


class SolverLogFormatter(logging.Formatter):
    """Indents records by group depth; logger names are shown for DEBUG and ERROR and above"""

    def __init__(self, use_colors=True, stream=None):
        super().__init__(fmt=_SHORT_FORMAT, datefmt=DATE_FORMAT)
        self._long = logging.Formatter(fmt=_LONG_FORMAT, datefmt=DATE_FORMAT)
        self._short = logging.Formatter(fmt=_SHORT_FORMAT, datefmt=DATE_FORMAT)
        stream = stream if stream is not None else sys.stderr
        self.use_colors = use_colors and getattr(stream, 'isatty', lambda: False)()

    def format(self, record):
        verbose = record.levelno == logging.DEBUG or record.levelno >= logging.ERROR
        formatter = self._long if verbose else self._short

        message = record.msg
        record.msg = '  ' * _depth() + str(message)
        try:
            text = formatter.format(record)
        finally:
            record.msg = message

        if self.use_colors:
            text = f"{LEVEL_COLORS.get(record.levelno, Fore.WHITE)}{text}{Style.RESET_ALL}"
        return text


class LogGroup:
    """
    Context manager that titles and indents a stretch of log output

    The closing line reports the wall time of the group, or the error that
    ended it. Exceptions are never swallowed.
    """

    def __init__(self, logger, title=None, level=logging.INFO):
        self.logger = logger
        self.title = title
        self.level = level
        self.started = None

    def __enter__(self):
        if self.title:
            self.logger.log(self.level, f"▶ {self.title}")
        _nesting.depth = _depth() + 1
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        elapsed = time.perf_counter() - self.started
        _nesting.depth = max(0, _depth() - 1)
        if self.title:
            if exc_type is not None:
                kind = getattr(exc_val, 'kind', exc_type.__name__)
                self.logger.error(f"✘ {self.title} ({kind}) after {elapsed:.3f}s: {exc_val}")
            else:
                self.logger.log(self.level, f"✓ {self.title} ({elapsed:.3f}s)")
        return False


def setup_logging(console_level=logging.WARNING, log_file=None, log_file_level=logging.INFO, use_colors=True):
    """
    Route package logging to stderr and, optionally, a file

    Args:
        console_level: Threshold for stderr (default: WARNING, so result tables stay clean)
        log_file: Optional path; parent directories are created
        log_file_level: Threshold for the file (default: INFO)
        use_colors: Colour stderr output when it is a terminal

    Returns:
        The configured root logger
    """
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(SolverLogFormatter(use_colors=use_colors, stream=sys.stderr))
    console_handler.setLevel(console_level)
    root_logger.addHandler(console_handler)
    root_logger.setLevel(min(console_level, log_file_level) if log_file else console_level)

    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(SolverLogFormatter(use_colors=False))
        file_handler.setLevel(log_file_level)
        root_logger.addHandler(file_handler)

    # pandas pulls in numexpr, which announces its thread count at INFO
    for name in ('numexpr', 'numexpr.utils'):
        logging.getLogger(name).setLevel(logging.WARNING)

    return root_logger


def get_logger(name=None):
    """Return ``logging.getLogger(name)`` with a ``group(title, level)`` method attached"""
    logger = logging.getLogger(name)
    logger.group = lambda title=None, level=logging.INFO: LogGroup(logger, title, level)
    return logger


def log_execution_time(logger=None, level=logging.INFO):
    """
    Decorator that logs how long a solver entry point took

    Failures are logged with the error kind and re-raised unchanged.
    """
    logger = logger if logger is not None else logging.getLogger()

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                kind = getattr(exc, 'kind', type(exc).__name__)
                logger.log(level, f"{func.__qualname__} failed ({kind}) after {time.perf_counter() - started:.4f}s")
                raise
            logger.log(level, f"{func.__qualname__} finished in {time.perf_counter() - started:.4f}s")
            return result

        return wrapper

    return decorator


def _context_value(value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        return str(value)
    if isinstance(value, numbers.Integral):
        return str(value)
    return f"{value:.6g}"


def format_with_context(message, context):
    """Append ``key=value`` pairs to a message; reals are shown with 6 significant digits"""
    if not context:
        return message
    pairs = ' '.join(f"{key}={_context_value(value)}" for key, value in context.items())
    return f"{message} [{pairs}]"
