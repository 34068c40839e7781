import logging
import time
from dataclasses import dataclass, field
from typing import Optional

from .base_service import BaseService
from .reference_service import ReferenceService
from ..config import get_oracle_steps
from ..core.analysis import ErrorReport, error_report, empirical_order
from ..core.problems import BenchmarkEntry, get_benchmark, list_benchmarks
from ..core.solver import SolverConfig, Trajectory, march
from ..errors import MissingReferenceError
from ..utils.logging import log_execution_time, format_with_context
from ..validation import RunRequest

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RunResult:
    """
    Everything produced by one benchmark run

    Attributes:
        entry: The benchmark that was solved
        request: The validated request
        config: Solver configuration actually used
        trajectory: Solver output
        report: Errors at the reporting times, None when compare is 'none'
        compare: 'exact', 'oracle' or 'none'
        elapsed: Wall-clock seconds spent in the solver
    """
    entry: BenchmarkEntry
    request: RunRequest
    config: SolverConfig
    trajectory: Trajectory
    report: Optional[ErrorReport]
    compare: str
    elapsed: float
    timestamp: str = field(default='')


class BenchmarkService(BaseService):
    """
    Main service to run the registered benchmarks

    This service integrates:
    1. The block solver (march) configured from the request and settings
    2. ReferenceService - cached RK4 oracles for problems without a closed form
    3. Error analysis - per-time error reports and convergence-order studies
    """

    def __init__(self, settings=None, references=None):
        super().__init__(settings)
        self.references = references or ReferenceService(self.settings)

    def names(self):
        """
        Get the registered benchmark names

        Returns:
            list: Benchmark identifiers in registry order
        """
        return list_benchmarks()

    def describe(self):
        """
        Get a summary row for every benchmark

        Returns:
            list: dicts with name, title, dimension, domain, default_blocks, has_exact, published_norm
        """
        rows = []
        for name in list_benchmarks():
            entry = get_benchmark(name)
            rows.append({
                'name': entry.name,
                'title': entry.title,
                'dimension': entry.problem.dimension,
                'domain': entry.problem.domain,
                'default_blocks': entry.default_blocks,
                'has_exact': entry.has_exact,
                'published_norm': entry.published_norm,
            })
        return rows

    def _config_for(self, entry, points, blocks, newton_tol, max_iter):
        return SolverConfig.from_settings(
            points_per_block=self.solver_setting('points_per_block', points),
            block_count=blocks or entry.default_blocks,
            newton_tol=self.solver_setting('newton_tol', newton_tol),
            newton_max_iter=self.solver_setting('newton_max_iter', max_iter),
        )

    def _reference_for(self, entry, compare, oracle_steps):
        if compare == 'exact':
            if not entry.has_exact:
                raise MissingReferenceError(
                    f"{entry.name} has no closed-form solution; use --compare oracle"
                )
            return None
        return self.references.oracle(entry, oracle_steps)

    @log_execution_time(logger)
    def run(self, request):
        """
        Solve one benchmark and compare it against its reference

        Args:
            request: RunRequest

        Returns:
            RunResult

        Raises:
            UnknownProblemError: the problem is not registered
            BlockFailure: a block failed to solve
            MissingNodeError: the block layout misses a reporting time
        """
        entry = get_benchmark(request.problem)
        config = self._config_for(entry, request.points, request.blocks,
                                  request.newton_tol, request.max_iter)
        compare = request.compare or ('exact' if entry.has_exact else 'oracle')

        with self.logger.group(f"Benchmark {entry.name} (M={config.block_count}, N={config.points_per_block})"):
            started = time.perf_counter()
            trajectory = march(entry.problem, config)
            elapsed = time.perf_counter() - started
            logger.info(format_with_context(f"Solved {entry.name} in {elapsed:.3f}s", trajectory.stats.as_dict()))

            report = None
            if compare != 'none':
                reference = self._reference_for(entry, compare, request.oracle_steps)
                report = error_report(trajectory, entry, reference)
                logger.info(f"{entry.name}: error norm {report.norm:.6e} against {report.source}")

        return RunResult(
            entry=entry,
            request=request,
            config=config,
            trajectory=trajectory,
            report=report,
            compare=compare,
            elapsed=elapsed,
            timestamp=self.get_timestamp(),
        )

    @log_execution_time(logger)
    def order(self, request):
        """
        Measure the convergence order of a benchmark by block halving

        Starts from request.blocks (default: the entry's default block count)
        and doubles it request.refinements - 1 times.

        Args:
            request: OrderRequest

        Returns:
            tuple: (BenchmarkEntry, OrderEstimate)
        """
        entry = get_benchmark(request.problem)
        config = self._config_for(entry, request.points, request.blocks,
                                  request.newton_tol, request.max_iter)
        a, b = entry.problem.domain
        oracle_steps = request.oracle_steps or get_oracle_steps(entry.stiff, span=b - a)

        reference = None
        if not entry.has_exact and entry.default_blocks % config.block_count == 0:
            # the cached oracle already has a node at every coarse block end
            reference = self.references.oracle(entry, oracle_steps)

        with self.logger.group(f"Order study {entry.name} (N={config.points_per_block})"):
            estimate = empirical_order(
                entry.problem, config, request.refinements,
                reference=reference, oracle_steps=oracle_steps, workers=request.workers,
            )
            logger.info(f"{entry.name}: estimated order {estimate.estimated_order:.3f}")
        return entry, estimate

