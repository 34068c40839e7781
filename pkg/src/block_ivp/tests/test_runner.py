"""
Stand-alone runner for the solver tests

Imports every ``test_*`` module in this package and calls its test
functions in order, logging coloured progress and a per-module summary.
The tests are plain functions, so pytest collects the same set.

    cd src && python -m block_ivp.tests.test_runner [pattern]
"""
import importlib
import inspect
import logging
import pkgutil
import sys
import time
import traceback
from datetime import datetime
from typing import Callable, List, Tuple

import pandas as pd
import pytest

from .test_utils import TestStatus, log_test, log_section, colorize, RULE

_HELPER_MODULES = frozenset({'test_utils', 'test_runner'})


class TestRunner:
    """
    Collects and runs test functions

    Args:
        logger: Receives the progress output
        pattern: Optional substring filter on ``module.function``
    """
    __test__ = False

    def __init__(self, logger, pattern=None):
        self.logger = logger
        self.pattern = pattern
        self.records = []

    def test_module_names(self) -> List[str]:
        package = sys.modules[__package__]
        return sorted(
            info.name for info in pkgutil.iter_modules(package.__path__)
            if info.name.startswith('test_') and info.name not in _HELPER_MODULES
        )

    def discover_tests(self) -> List[Tuple[str, str, Callable]]:
        """
        Returns:
            (module, function name, function) for every selected test, in
            module order then definition order
        """
        found = []
        for module_name in self.test_module_names():
            try:
                module = importlib.import_module(f"{__package__}.{module_name}")
            except ImportError as exc:
                log_test(module_name, TestStatus.FAILED, "import failed", exc)
                self.records.append({'module': module_name, 'test': '<import>', 'status': 'failed', 'seconds': 0.0})
                continue

            functions = [
                (name, func) for name, func in inspect.getmembers(module, inspect.isfunction)
                if name.startswith('test_') and func.__module__ == module.__name__
            ]
            functions.sort(key=lambda item: inspect.getsourcelines(item[1])[1])
            for name, func in functions:
                if self.pattern and self.pattern not in f"{module_name}.{name}":
                    continue
                found.append((module_name, name, func))
        return found

    def _run_one(self, module_name, name, func):
        started = time.perf_counter()
        try:
            func()
        except pytest.skip.Exception as exc:
            status = 'skipped'
            log_test(name, TestStatus.SKIPPED, str(exc))
        except Exception as exc:
            status = 'failed'
            log_test(name, TestStatus.FAILED, exception=exc)
            self.logger.error(''.join(traceback.format_exception(type(exc), exc, exc.__traceback__)))
        else:
            status = 'success'
        seconds = time.perf_counter() - started
        if status == 'success':
            log_test(name, TestStatus.SUCCESS, f"{seconds:.3f}s")
        self.records.append({'module': module_name, 'test': name, 'status': status, 'seconds': seconds})

    def summary(self) -> pd.DataFrame:
        """Per-module counts of passed, failed and skipped tests, with total time"""
        frame = pd.DataFrame(self.records, columns=['module', 'test', 'status', 'seconds'])
        counts = pd.crosstab(frame['module'], frame['status'])
        for column in ('success', 'failed', 'skipped'):
            if column not in counts:
                counts[column] = 0
        counts = counts[['success', 'failed', 'skipped']]
        counts['seconds'] = frame.groupby('module')['seconds'].sum().round(3)
        return counts

    def run_tests(self):
        """
        Run every selected test

        Returns:
            dict: total, success, failed, skipped and the summary frame
        """
        self.logger.info(RULE)
        self.logger.info(colorize(TestStatus.INFO, f"block-ivp tests, {datetime.now():%Y-%m-%d %H:%M:%S}"))
        self.logger.info(RULE)

        tests = self.discover_tests()
        if not tests:
            self.logger.warning(colorize(TestStatus.SKIPPED, "no tests selected"))

        current = None
        for module_name, name, func in tests:
            if module_name != current:
                current = module_name
                log_section(module_name[5:].replace('_', ' '))
            log_test(name, TestStatus.RUNNING)
            self._run_one(module_name, name, func)

        frame = pd.DataFrame(self.records, columns=['module', 'test', 'status', 'seconds'])
        results = {
            'total': len(frame),
            'success': int((frame['status'] == 'success').sum()),
            'failed': int((frame['status'] == 'failed').sum()),
            'skipped': int((frame['status'] == 'skipped').sum()),
            'summary': self.summary() if len(frame) else frame,
        }

        self.logger.info(RULE)
        if len(frame):
            self.logger.info('\n' + results['summary'].to_string())
        if results['failed']:
            self.logger.error(colorize(TestStatus.FAILED, f"✗ {results['failed']} of {results['total']} tests failed"))
        else:
            self.logger.info(colorize(TestStatus.SUCCESS, f"✓ {results['success']} of {results['total']} tests passed"))
        self.logger.info(RULE)
        return results


def run_all_tests(pattern=None):
    """Run the suite (optionally filtered) and return the results dict"""
    return TestRunner(logging.getLogger("block_ivp.tests"), pattern).run_tests()


if __name__ == "__main__":
    from ..utils.logging import setup_logging

    setup_logging(console_level=logging.INFO)
    outcome = run_all_tests(sys.argv[1] if len(sys.argv) > 1 else None)
    sys.exit(1 if outcome['failed'] else 0)
