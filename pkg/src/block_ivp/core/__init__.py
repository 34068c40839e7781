"""
Numerical core: differentiation matrices, the block solver, the benchmark
registry and error analysis.
"""

from .diffmat import (
    NodeSet,
    DiffMatrices,
    equispaced_nodes,
    build,
    scaled_interior,
    shifted_spectrum,
    identity_residual,
    differentiate,
    max_coupling,
)
from .solver import (
    IvpProblem,
    LinearPart,
    SolverConfig,
    SolverStats,
    BlockSolution,
    Trajectory,
    JacobianMode,
    solve_block_linear,
    solve_block_newton,
    fd_jacobian,
    march,
)
from .problems import BenchmarkEntry, NormKind, get_benchmark, list_benchmarks
from .analysis import (
    ErrorReport,
    OrderEstimate,
    rk4_reference,
    error_report,
    empirical_order,
    stability_probe,
)

__all__ = [
    'NodeSet', 'DiffMatrices', 'equispaced_nodes', 'build', 'scaled_interior',
    'shifted_spectrum', 'identity_residual', 'differentiate', 'max_coupling',
    'IvpProblem', 'LinearPart', 'SolverConfig', 'SolverStats', 'BlockSolution',
    'Trajectory', 'JacobianMode', 'solve_block_linear', 'solve_block_newton',
    'fd_jacobian', 'march',
    'BenchmarkEntry', 'NormKind', 'get_benchmark', 'list_benchmarks',
    'ErrorReport', 'OrderEstimate', 'rk4_reference', 'error_report',
    'empirical_order', 'stability_probe',
]
