"""
Block IVP Solver

Block-implicit collocation solver for initial value problems built on
Lagrange differentiation matrices, with a benchmark harness that reproduces
the classic test problems and their error tables.
"""

from .api import run_benchmark, estimate_order, list_problems, get_benchmark_service
from .core import IvpProblem, SolverConfig, march

__all__ = [
    'run_benchmark', 'estimate_order', 'list_problems', 'get_benchmark_service',
    'IvpProblem', 'SolverConfig', 'march',
]
