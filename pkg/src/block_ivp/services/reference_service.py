"""
Cached RK4 oracle trajectories
"""
import logging
import threading

from .base_service import BaseService
from ..config import ORACLE_DEFAULTS, get_oracle_steps
from ..core.analysis import rk4_reference

# Configure logging
logger = logging.getLogger(__name__)


class ReferenceService(BaseService):
    """
    Computes RK4 oracles for benchmark entries and keeps them in memory

    Oracles are keyed by (problem name, steps per unit time). The step count is
    aligned to the entry's default block count so every reporting time is an
    oracle node.
    """

    def __init__(self, settings=None):
        super().__init__(settings)
        self.cache_data = {}
        self.cache_lock = threading.Lock()

    def oracle(self, entry, steps_per_unit=None):
        """
        Get the oracle trajectory of a benchmark entry

        Args:
            entry: BenchmarkEntry
            steps_per_unit: RK4 steps per unit time; defaults to 10^5 for stiff
                entries and 10^4 otherwise, lowered on long intervals so a run
                stays within ORACLE_DEFAULTS['max_total_steps']

        Returns:
            Trajectory: The cached or freshly integrated oracle
        """
        a, b = entry.problem.domain
        steps = steps_per_unit or get_oracle_steps(entry.stiff, span=b - a)
        key = (entry.name, steps)
        with self.cache_lock:
            cached = self.cache_data.get(key)
        if cached is not None:
            logger.debug(f"Oracle cache hit for {entry.name} ({steps} steps/unit)")
            return cached

        total = (b - a) * steps
        if total > ORACLE_DEFAULTS['max_total_steps']:
            logger.warning(
                f"RK4 oracle for {entry.name} needs {total:,.0f} steps; expect a long run "
                f"(fewer --oracle-steps, or leave it unset for a capped default)"
            )
        logger.info(f"Integrating RK4 oracle for {entry.name} with {steps} steps per unit time")
        trajectory = rk4_reference(entry.problem, steps, align=entry.default_blocks)
        with self.cache_lock:
            # another thread may have finished first; keep a single copy
            trajectory = self.cache_data.setdefault(key, trajectory)
        return trajectory

    def clear(self):
        """Drop every cached oracle"""
        with self.cache_lock:
            count = len(self.cache_data)
            self.cache_data.clear()
        logger.debug(f"Cleared {count} cached oracles")

    def __len__(self):
        with self.cache_lock:
            return len(self.cache_data)
