"""
Tests for the block solver: linear and Newton paths, marching and failures
"""
from dataclasses import replace

import numpy as np
import pytest

from .test_utils import log_test, TestStatus, timed_test, scalar_linear_problem
from ..core.diffmat import build, equispaced_nodes
from ..core.problems import get_benchmark
from ..core.solver import (
    IvpProblem,
    LinearPart,
    SolverConfig,
    JacobianMode,
    solve_block_linear,
    solve_block_newton,
    fd_jacobian,
    march,
)
from ..errors import (
    BlockFailure,
    InvalidConfigError,
    InvalidProblemError,
    MissingNodeError,
)


@timed_test
def test_linear_block_matches_exponential():
    """One block of x' = -x with N=5 is accurate to the interpolation error"""
    matrices = build(equispaced_nodes(0.0, 0.1, 6))
    block = solve_block_linear(matrices, -1.0, lambda t: np.zeros(1), np.array([1.0]))
    expected = np.exp(-matrices.nodes.nodes[1:])
    assert block.iterations == 0
    assert block.stats.linear_solves == 1
    np.testing.assert_allclose(block.xi[:, 0], expected, atol=1e-8)


@timed_test
def test_polynomial_solution_is_exact():
    """x' = 3t^2 has the cubic solution t^3, which N >= 3 reproduces to rounding"""
    problem = IvpProblem(
        dimension=1,
        rhs=lambda x, t: np.array([3.0 * t ** 2]),
        domain=(0.0, 2.0),
        initial=[0.0],
        jacobian=lambda x, t: np.zeros((1, 1)),
        exact=lambda t: np.array([t ** 3]),
        name='cubic',
    )
    trajectory = march(problem, SolverConfig(points_per_block=3, block_count=4))
    np.testing.assert_allclose(trajectory.values[:, 0], trajectory.times ** 3, atol=1e-12)


@timed_test
def test_march_decay_accuracy():
    test_name = "March Decay Accuracy"
    log_test(test_name, TestStatus.RUNNING, "x' = -x on [0, 1], M=10, N=5")

    problem = scalar_linear_problem(-1.0)
    trajectory = march(problem, SolverConfig(points_per_block=5, block_count=10))

    assert len(trajectory) == 50
    assert trajectory.final_time == 1.0
    error = np.max(np.abs(trajectory.values[:, 0] - np.exp(-trajectory.times)))
    assert error <= 1e-7, f"max error {error:.3e}"
    log_test(test_name, TestStatus.SUCCESS, f"max error {error:.2e}")


@timed_test
def test_blocks_chain_through_last_node():
    """Each block starts from the previous block's last node value"""
    problem = scalar_linear_problem(-2.0)
    trajectory = march(problem, SolverConfig(points_per_block=4, block_count=3))

    assert list(np.unique(trajectory.block_index)) == [0, 1, 2]
    ends = [trajectory.times[trajectory.block_index == k][-1] for k in range(3)]
    np.testing.assert_allclose(ends, [1.0 / 3.0, 2.0 / 3.0, 1.0], atol=1e-15)
    assert np.all(np.diff(trajectory.times) > 0)


@timed_test
def test_newton_matches_linear_path_on_linear_benchmarks():
    """Newton needs at most 2 iterations per block on affine problems and agrees with the direct solve"""
    test_name = "Newton Versus Linear Path"
    log_test(test_name, TestStatus.RUNNING)

    for name in ('example1', 'example2', 'example4'):
        entry = get_benchmark(name)
        config = SolverConfig(points_per_block=5, block_count=entry.default_blocks)

        direct = march(entry.problem, config)
        newton = march(entry.problem, replace(config, use_linear_path=False))

        assert direct.stats.newton_iterations == 0
        assert newton.stats.newton_iterations <= 2 * config.block_count, name
        scale = np.maximum(1.0, np.abs(direct.values))
        assert np.max(np.abs(newton.values - direct.values) / scale) <= 1e-9, name

    log_test(test_name, TestStatus.SUCCESS)


@timed_test
def test_newton_block_iteration_count():
    entry = get_benchmark('example1')
    problem = entry.problem.without_linear_part()
    matrices = build(equispaced_nodes(0.0, 0.02, 6))
    block = solve_block_newton(matrices, problem, problem.initial, SolverConfig())
    assert 1 <= block.iterations <= 2
    assert block.residual_norm <= 1e-8
    assert block.stats.newton_iterations == block.iterations


@timed_test
def test_finite_difference_jacobian_agrees_with_analytic():
    entry = get_benchmark('example5')
    problem = entry.problem
    x = np.array([0.3, 0.7])
    approx = fd_jacobian(problem.rhs, x, 0.5)
    np.testing.assert_allclose(approx, problem.jacobian(x, 0.5), atol=1e-6)

    config = SolverConfig(points_per_block=5, block_count=5)
    analytic = march(get_benchmark('example3').problem, config)
    differenced = march(get_benchmark('example3').problem,
                        replace(config, jacobian_mode=JacobianMode.FINITE_DIFFERENCE))
    np.testing.assert_allclose(differenced.values, analytic.values, atol=1e-8)
    assert differenced.stats.rhs_evaluations > analytic.stats.rhs_evaluations


@timed_test
def test_explicit_boundaries():
    """Non-uniform blocks still track the closed form"""
    entry = get_benchmark('example3')
    config = SolverConfig(points_per_block=5, boundaries=(0.0, 0.1, 0.25, 0.45, 0.7, 1.0))
    assert config.block_count == 5

    trajectory = march(entry.problem, config)
    error = abs(trajectory.value_at(1.0)[0] - entry.problem.exact_at(1.0)[0])
    assert error <= 1e-5, f"error at t=1 {error:.3e}"


@timed_test
def test_boundaries_must_span_domain():
    problem = scalar_linear_problem(-1.0)
    with pytest.raises(InvalidConfigError):
        march(problem, SolverConfig(boundaries=(0.0, 0.5, 0.9)))


@timed_test
def test_singular_block_reports_index_and_kind():
    """x' = x with N=1 on a unit block makes D - A exactly zero"""
    test_name = "Singular Block"
    log_test(test_name, TestStatus.RUNNING)

    problem = scalar_linear_problem(1.0)
    with pytest.raises(BlockFailure) as excinfo:
        march(problem, SolverConfig(points_per_block=1, block_count=1))
    assert excinfo.value.block_index == 0
    assert excinfo.value.kind == 'singular-system'
    assert 'block 0' in str(excinfo.value)

    log_test(test_name, TestStatus.SUCCESS)


@timed_test
def test_newton_iteration_cap():
    entry = get_benchmark('example3')
    with pytest.raises(BlockFailure) as excinfo:
        march(entry.problem, SolverConfig(points_per_block=5, block_count=5, newton_max_iter=1))
    assert excinfo.value.kind == 'newton-divergence'
    assert excinfo.value.block_index == 0


@timed_test
def test_config_validation():
    for kwargs in ({'points_per_block': 0}, {'block_count': 0}, {'newton_tol': 0.0},
                   {'newton_max_iter': 0}, {'boundaries': (0.0, 0.5, 0.5)},
                   {'jacobian_mode': 'secant'}, {'fd_epsilon': -1.0}):
        with pytest.raises(InvalidConfigError):
            SolverConfig(**kwargs)

    assert SolverConfig(block_count=3).refined().block_count == 6


@timed_test
def test_problem_validation():
    with pytest.raises(InvalidProblemError):
        IvpProblem(dimension=2, rhs=lambda x, t: x, domain=(0.0, 1.0), initial=[1.0])
    with pytest.raises(InvalidProblemError):
        IvpProblem(dimension=1, rhs=lambda x, t: x, domain=(1.0, 0.0), initial=[1.0])
    with pytest.raises(InvalidProblemError):
        # declared linear part disagrees with the rhs
        IvpProblem(dimension=1, rhs=lambda x, t: 2.0 * x, domain=(0.0, 1.0), initial=[1.0],
                   linear_part=LinearPart(np.array([[3.0]]), lambda t: np.zeros(1)))


@timed_test
def test_trajectory_lookup():
    problem = scalar_linear_problem(-1.0, initial=2.0)
    trajectory = march(problem, SolverConfig(points_per_block=2, block_count=2))

    np.testing.assert_array_equal(trajectory.value_at(0.0), [2.0])
    np.testing.assert_array_equal(trajectory.value_at(0.5), trajectory.values[1])
    with pytest.raises(MissingNodeError):
        trajectory.value_at(0.3)

    frame = trajectory.to_frame()
    assert list(frame.columns) == ['t', 'block', 'x_1']
    assert len(frame) == 4


@timed_test
def test_stats_accumulate_over_blocks():
    entry = get_benchmark('example3')
    trajectory = march(entry.problem, SolverConfig(points_per_block=5, block_count=5))
    stats = trajectory.stats
    assert stats.newton_iterations >= 5
    assert stats.linear_solves == stats.newton_iterations
    assert stats.rhs_evaluations == 5 * stats.block_rhs_evaluations


@timed_test
def test_linear_block_of_constant_rate():
    """x' = 1 from 0 on nodes {0, 1, 2} is solved exactly by xi = (1, 2)"""
    matrices = build(equispaced_nodes(0.0, 2.0, 3))
    block = solve_block_linear(matrices, 0.0, lambda t: np.ones(1), np.zeros(1))
    np.testing.assert_allclose(block.xi[:, 0], [1.0, 2.0], atol=1e-14)

    shifted = solve_block_linear(matrices, 0.0, lambda t: np.array([-3.0]), np.array([1.0]))
    np.testing.assert_allclose(shifted.xi[:, 0], [-2.0, -5.0], atol=1e-13)


@timed_test
def test_finite_difference_jacobian_of_example3():
    """d/dx [5e^(5t)(x - t)^2 + 1] at x = -1, t = 0 is -10"""
    problem = get_benchmark('example3').problem
    approx = fd_jacobian(problem.rhs, np.array([-1.0]), 0.0)
    assert approx.shape == (1, 1)
    assert approx[0, 0] == pytest.approx(-10.0, rel=1e-6)


@timed_test
def test_newton_on_zero_rhs_keeps_initial_value():
    problem = IvpProblem(dimension=1, rhs=lambda x, t: np.zeros(1), domain=(0.0, 1.0), initial=[3.0],
                         jacobian=lambda x, t: np.zeros((1, 1)), name='constant')
    matrices = build(equispaced_nodes(0.0, 0.5, 6))
    block = solve_block_newton(matrices, problem, problem.initial, SolverConfig())
    assert block.iterations <= 1
    np.testing.assert_allclose(block.xi[:, 0], 3.0, atol=1e-14)


@timed_test
def test_newton_residual_contract_on_every_block():
    """|D xi - f(xi) + alpha d|_inf <= 10 tol max(1, |f(xi)|_inf) after each converged block"""
    test_name = "Newton Residual Contract"
    log_test(test_name, TestStatus.RUNNING)

    worst = 0.0
    for name in ('example3', 'example5'):
        entry = get_benchmark(name)
        problem = entry.problem.without_linear_part()
        config = SolverConfig(points_per_block=5, block_count=entry.default_blocks)
        bounds = config.block_boundaries(problem.a, problem.b)
        alpha = problem.initial
        for index in range(len(bounds) - 1):
            matrices = build(equispaced_nodes(bounds[index], bounds[index + 1], 6))
            block = solve_block_newton(matrices, problem, alpha, config)
            t = matrices.nodes.nodes[1:]
            f_values = np.array([problem.evaluate(x, tj) for x, tj in zip(block.xi, t)])
            residual = (np.kron(matrices.interior, np.eye(problem.dimension)) @ block.xi.ravel()
                        - f_values.ravel() + np.kron(matrices.coupling, alpha))
            bound = 10.0 * config.newton_tol * max(1.0, float(np.max(np.abs(f_values))))
            ratio = float(np.max(np.abs(residual))) / bound
            assert ratio <= 1.0, (name, index, ratio)
            worst = max(worst, ratio)
            alpha = block.xi[-1]

    log_test(test_name, TestStatus.SUCCESS, f"worst residual / bound {worst:.2e}")


@timed_test
def test_overflowing_rhs_is_newton_divergence():
    """A right-hand side that overflows inside a block is reported as divergence"""
    problem = IvpProblem(dimension=1, rhs=lambda x, t: np.exp(1e3 * x), domain=(0.0, 1.0), initial=[1.0],
                         jacobian=lambda x, t: np.atleast_2d(1e3 * np.exp(1e3 * x)), name='overflow')
    with np.errstate(over='ignore', invalid='ignore'):
        with pytest.raises(BlockFailure) as excinfo:
            march(problem, SolverConfig(points_per_block=3, block_count=1))
    assert excinfo.value.kind == 'newton-divergence'
