"""
Tests for the service layer, the public API and request validation
"""
import os
import threading
from unittest import mock

import pytest

from .test_utils import log_test, TestStatus, timed_test
from ..api import get_benchmark_service, run_benchmark, estimate_order, list_problems
from ..config import get_solver_settings, get_oracle_steps, get_log_level
from ..core.problems import get_benchmark
from ..errors import RequestValidationError, BlockFailure
from ..reporting import render_run, run_frame
from ..services import BenchmarkService, ReferenceService, reference_service
from ..validation import RunRequest, OrderRequest, validate_request


@timed_test
def test_reference_service_caches_oracles():
    test_name = "Oracle Cache"
    log_test(test_name, TestStatus.RUNNING)

    references = ReferenceService()
    entry = get_benchmark('example5')
    first = references.oracle(entry, 1_000)
    second = references.oracle(entry, 1_000)
    assert first is second
    assert len(references) == 1

    other = references.oracle(entry, 2_000)
    assert other is not first
    assert len(references) == 2

    references.clear()
    assert len(references) == 0
    log_test(test_name, TestStatus.SUCCESS)


@timed_test
def test_reference_service_is_thread_safe():
    references = ReferenceService()
    entry = get_benchmark('example5')
    results = []

    def worker():
        results.append(references.oracle(entry, 4_000))

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert len(references) == 1
    assert all(result is results[0] for result in results)


@timed_test
def test_oracle_is_aligned_to_reporting_grid():
    references = ReferenceService()
    entry = get_benchmark('example5')
    oracle = references.oracle(entry, 10)
    # 10 steps rounded up to 12, a multiple of the 4 default blocks
    assert len(oracle) % entry.default_blocks == 0
    oracle.values_at(entry.reporting_times)


@timed_test
def test_service_run_result():
    service = BenchmarkService()
    result = service.run(RunRequest(problem='example3'))

    assert result.compare == 'exact'
    assert result.config.block_count == 20
    assert result.report.norm <= 1e-7
    assert result.elapsed >= 0.0
    assert result.timestamp

    table = render_run(result)
    assert table.startswith('example3: ')
    assert 'published' in run_frame(result).columns


@timed_test
def test_service_defaults_to_oracle_without_closed_form():
    service = BenchmarkService()
    result = service.run(RunRequest(problem='example5', oracle_steps=2_000))
    assert result.compare == 'oracle'
    assert result.report.source == 'oracle'
    assert len(service.references) == 1


@timed_test
def test_service_propagates_block_failures():
    service = BenchmarkService()
    with pytest.raises(BlockFailure):
        service.run(RunRequest(problem='example3', max_iter=1))


@timed_test
def test_public_api():
    test_name = "Public API"
    log_test(test_name, TestStatus.RUNNING)

    assert get_benchmark_service() is get_benchmark_service()
    assert list_problems() == ['example1', 'example2', 'example3', 'example4', 'example5']

    result = run_benchmark('example1', blocks=10)
    assert 2e-5 <= result.report.norm <= 2e-4

    entry, estimate = estimate_order('example3', points=5, refinements=2)
    assert entry.name == 'example3'
    assert estimate.block_counts == (20, 40)

    rows = get_benchmark_service().describe()
    assert [row['name'] for row in rows] == list_problems()

    log_test(test_name, TestStatus.SUCCESS)


@timed_test
def test_request_validation():
    with pytest.raises(RequestValidationError):
        RunRequest(problem='example1', points=0)
    with pytest.raises(RequestValidationError):
        RunRequest(problem='example1', output_format='xml')
    with pytest.raises(RequestValidationError):
        RunRequest(problem='example1', compare='closed-form')
    with pytest.raises(RequestValidationError):
        RunRequest(problem='example1', newton_tol=0.0)
    with pytest.raises(RequestValidationError):
        OrderRequest(problem='example3', refinements=1)
    with pytest.raises(RequestValidationError):
        validate_request('missing-schema', {})

    assert RunRequest(problem='example1', blocks=None, compare=None).points == 5


@timed_test
def test_environment_overrides():
    with mock.patch.dict(os.environ, {'BLOCK_IVP_NEWTON_TOL': '1e-10', 'BLOCK_IVP_POINTS': 'seven'}):
        settings = get_solver_settings()
    assert settings['newton_tol'] == 1e-10
    assert settings['points_per_block'] == 5

    with mock.patch.dict(os.environ, {'BLOCK_IVP_LOG_LEVEL': 'debug'}):
        assert get_log_level() == 10
    with mock.patch.dict(os.environ, {'BLOCK_IVP_LOG_LEVEL': 'chatty'}):
        assert get_log_level() == 30

    assert get_oracle_steps(stiff=True) == 100_000
    assert get_oracle_steps(stiff=False) == 10_000


@timed_test
def test_oracle_default_is_capped_on_long_intervals():
    """example4 spans [0, 50]; the stiff default would need 5e6 RK4 steps"""
    assert get_oracle_steps(stiff=True, span=50.0) == 4_000
    assert get_oracle_steps(stiff=True, span=0.2) == 100_000
    assert get_oracle_steps(stiff=False, span=1.0) == 10_000

    entry = get_benchmark('example4')
    references = ReferenceService()
    with mock.patch.object(reference_service, 'rk4_reference', return_value='oracle') as integrate:
        assert references.oracle(entry) == 'oracle'
        references.oracle(entry, 100_000)
    steps = [call.args[1] for call in integrate.call_args_list]
    assert steps == [4_000, 100_000]
    assert len(references) == 2
