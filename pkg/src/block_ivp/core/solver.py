"""
Block-implicit solver for x'(t) = f(x, t), x(a) = alpha

[a, b] is split into blocks. On each block the differential equation is
enforced at the N interior nodes of an (N+1)-point equispaced grid, which
gives the coupled system

    D xi - f(xi) = -alpha d

for the N unknown node values. Affine right-hand sides are solved directly;
everything else goes through Newton's method. The last node value of a block
becomes the initial value of the next one.

Vector problems use node-major stacking xi = (xi_1, ..., xi_N), each xi_j in
R^m, so the block matrix is kron(D, 1_m) minus the block-diagonal Jacobian.
"""
import logging
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.linalg

from .diffmat import equispaced_nodes, build
from ..config import get_solver_settings
from ..errors import (
    BlockIvpError,
    BlockFailure,
    InvalidConfigError,
    InvalidProblemError,
    MissingNodeError,
    NewtonDivergenceError,
    SingularSystemError,
)
from ..utils.logging.logging_utils import log_execution_time

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_PIVOT_FACTOR = 1e3 * _EPS
_LINEAR_CHECK_TOL = 1e-12


class JacobianMode(str, Enum):
    ANALYTIC = 'analytic'
    FINITE_DIFFERENCE = 'finite-difference'


@dataclass(frozen=True, eq=False)
class LinearPart:
    """Marks f(x, t) = A x + phi(t)"""
    matrix: np.ndarray
    forcing: Callable[[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class IvpProblem:
    """
    An initial value problem x' = f(x, t) on [a, b] with x(a) = initial

    Attributes:
        dimension: Number of state components m
        rhs: f(x, t) taking and returning arrays of shape (m,)
        domain: (a, b) with a < b
        initial: Initial state alpha, shape (m,)
        jacobian: Optional analytic df/dx(x, t), shape (m, m)
        exact: Optional closed-form solution t -> R^m
        linear_part: Optional LinearPart when f is affine in x
        name: Label used in logs and reports
    """
    dimension: int
    rhs: Callable[[np.ndarray, float], np.ndarray]
    domain: Tuple[float, float]
    initial: np.ndarray
    jacobian: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    exact: Optional[Callable[[float], np.ndarray]] = None
    linear_part: Optional[LinearPart] = None
    name: str = "ivp"

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidProblemError(f"dimension must be a positive integer, got {self.dimension}")
        a, b = (float(v) for v in self.domain)
        if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
            raise InvalidProblemError(f"invalid domain [{a}, {b}]: need a < b")
        initial = np.atleast_1d(np.asarray(self.initial, dtype=float)).copy()
        if initial.shape != (self.dimension,):
            raise InvalidProblemError(
                f"initial value has shape {initial.shape}, expected ({self.dimension},)"
            )
        initial.setflags(write=False)
        object.__setattr__(self, 'domain', (a, b))
        object.__setattr__(self, 'initial', initial)

        if self.linear_part is not None:
            matrix = np.atleast_2d(np.asarray(self.linear_part.matrix, dtype=float)).copy()
            if matrix.shape != (self.dimension, self.dimension):
                raise InvalidProblemError(
                    f"linear part has shape {matrix.shape}, expected ({self.dimension}, {self.dimension})"
                )
            matrix.setflags(write=False)
            object.__setattr__(self, 'linear_part', LinearPart(matrix, self.linear_part.forcing))
            self._check_linear_part()

    @property
    def a(self):
        return self.domain[0]

    @property
    def b(self):
        return self.domain[1]

    def evaluate(self, x, t):
        """f(x, t) as a float array of shape (m,)"""
        value = np.asarray(self.rhs(x, t), dtype=float).reshape(-1)
        if value.shape != (self.dimension,):
            raise InvalidProblemError(
                f"rhs returned shape {value.shape}, expected ({self.dimension},)"
            )
        return value

    def exact_at(self, t):
        if self.exact is None:
            return None
        return np.atleast_1d(np.asarray(self.exact(t), dtype=float)).reshape(self.dimension)

    def with_initial(self, initial):
        """A copy of the problem starting from a different initial state"""
        return replace(self, initial=np.asarray(initial, dtype=float))

    def without_linear_part(self):
        """A copy that forgets the affine structure (forces the Newton path)"""
        return replace(self, linear_part=None)

    def _check_linear_part(self):
        matrix, forcing = self.linear_part.matrix, self.linear_part.forcing
        samples = (self.initial, self.initial + 0.5, np.ones(self.dimension))
        for t in np.linspace(self.a, self.b, 5):
            phi = np.atleast_1d(np.asarray(forcing(t), dtype=float))
            for x in samples:
                expected = matrix @ x + phi
                actual = self.evaluate(x, t)
                tol = _LINEAR_CHECK_TOL * max(1.0, float(np.max(np.abs(expected))))
                if np.max(np.abs(actual - expected)) > tol:
                    raise InvalidProblemError(
                        f"linear part of {self.name!r} disagrees with rhs at t={t}"
                    )


@dataclass(frozen=True)
class SolverConfig:
    """
    Discretisation and Newton settings

    Attributes:
        points_per_block: N, the unknown nodes per block
        block_count: M, number of uniform blocks on [a, b]
        boundaries: Optional explicit block boundaries from a to b
        newton_tol: Relative tolerance on the Newton update
        newton_max_iter: Newton iteration cap
        jacobian_mode: analytic (falls back to differences when absent) or finite-difference
        fd_epsilon: Fixed difference step; None scales sqrt(eps) by max(1, |x_j|)
        use_linear_path: Solve affine problems directly instead of by Newton
    """
    points_per_block: int = 5
    block_count: int = 1
    boundaries: Optional[Tuple[float, ...]] = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    jacobian_mode: JacobianMode = JacobianMode.ANALYTIC
    fd_epsilon: Optional[float] = None
    use_linear_path: bool = True

    def __post_init__(self):
        if int(self.points_per_block) != self.points_per_block or self.points_per_block < 1:
            raise InvalidConfigError(f"points_per_block must be >= 1, got {self.points_per_block}")
        if not self.newton_tol > 0:
            raise InvalidConfigError(f"newton_tol must be > 0, got {self.newton_tol}")
        if int(self.newton_max_iter) != self.newton_max_iter or self.newton_max_iter < 1:
            raise InvalidConfigError(f"newton_max_iter must be >= 1, got {self.newton_max_iter}")
        if self.fd_epsilon is not None and not self.fd_epsilon > 0:
            raise InvalidConfigError(f"fd_epsilon must be > 0, got {self.fd_epsilon}")
        try:
            object.__setattr__(self, 'jacobian_mode', JacobianMode(self.jacobian_mode))
        except ValueError:
            raise InvalidConfigError(f"unknown jacobian mode {self.jacobian_mode!r}")

        if self.boundaries is not None:
            bounds = tuple(float(v) for v in self.boundaries)
            if len(bounds) < 2 or np.any(np.diff(bounds) <= 0):
                raise InvalidConfigError("explicit block boundaries must be strictly increasing")
            object.__setattr__(self, 'boundaries', bounds)
            object.__setattr__(self, 'block_count', len(bounds) - 1)
        elif int(self.block_count) != self.block_count or self.block_count < 1:
            raise InvalidConfigError(f"block_count must be >= 1, got {self.block_count}")

    @classmethod
    def from_settings(cls, **overrides):
        """Build a config from the package settings, then apply overrides"""
        settings = get_solver_settings()
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)

    def block_boundaries(self, a, b):
        """Boundaries a = a_0 < a_1 < ... < a_M = b"""
        if self.boundaries is None:
            return np.linspace(a, b, self.block_count + 1)
        bounds = np.array(self.boundaries)
        scale = max(1.0, abs(a), abs(b))
        if abs(bounds[0] - a) > 1e-12 * scale or abs(bounds[-1] - b) > 1e-12 * scale:
            raise InvalidConfigError(
                f"block boundaries span [{bounds[0]}, {bounds[-1]}], problem domain is [{a}, {b}]"
            )
        bounds[0], bounds[-1] = a, b
        return bounds

    def refined(self, factor=2):
        """Uniform config with factor times as many blocks"""
        return replace(self, block_count=self.block_count * factor, boundaries=None)


@dataclass(frozen=True)
class SolverStats:
    """Work counters; block_rhs_evaluations counts evaluations of f over a whole block"""
    rhs_evaluations: int = 0
    block_rhs_evaluations: int = 0
    jacobian_evaluations: int = 0
    linear_solves: int = 0
    newton_iterations: int = 0

    def __add__(self, other):
        return SolverStats(
            rhs_evaluations=self.rhs_evaluations + other.rhs_evaluations,
            block_rhs_evaluations=self.block_rhs_evaluations + other.block_rhs_evaluations,
            jacobian_evaluations=self.jacobian_evaluations + other.jacobian_evaluations,
            linear_solves=self.linear_solves + other.linear_solves,
            newton_iterations=self.newton_iterations + other.newton_iterations,
        )

    def as_dict(self):
        return {
            'rhs_evaluations': self.rhs_evaluations,
            'block_rhs_evaluations': self.block_rhs_evaluations,
            'jacobian_evaluations': self.jacobian_evaluations,
            'linear_solves': self.linear_solves,
            'newton_iterations': self.newton_iterations,
        }


@dataclass(frozen=True, eq=False)
class BlockSolution:
    """
    Node values of one block

    Attributes:
        xi: (N, m) values at the interior nodes t_1..t_N
        iterations: Newton iterations used (0 for the direct linear path)
        residual_norm: max-norm of D xi - f(xi) + alpha d
    """
    xi: np.ndarray
    iterations: int
    residual_norm: float
    stats: SolverStats = field(default_factory=SolverStats)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Approximate solution at every interior node of every block

    The anchor (a, alpha) is implicit: it is not stored among the nodes but
    value_at(a) returns alpha.
    """
    times: np.ndarray
    values: np.ndarray
    block_index: np.ndarray
    problem: IvpProblem
    config: Optional[SolverConfig] = None
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def anchor(self):
        return self.problem.a, self.problem.initial

    @property
    def final_time(self):
        return float(self.times[-1])

    @property
    def final_value(self):
        return self.values[-1]

    def __len__(self):
        return len(self.times)

    def value_at(self, t, tol=1e-9):
        """
        State at a node time (or the anchor time a)

        Raises:
            MissingNodeError: t is not within tol of any node
        """
        a, alpha = self.anchor
        if abs(t - a) <= tol:
            return np.array(alpha)
        idx = int(np.searchsorted(self.times, t))
        for candidate in (idx - 1, idx):
            if 0 <= candidate < len(self.times) and abs(self.times[candidate] - t) <= tol:
                return self.values[candidate]
        raise MissingNodeError(f"t={t} is not a node of the trajectory")

    def values_at(self, times, tol=1e-9):
        return np.array([self.value_at(t, tol) for t in times])

    def to_frame(self):
        """pandas DataFrame with columns t, block, x_1..x_m"""
        frame = pd.DataFrame(self.values, columns=[f"x_{i + 1}" for i in range(self.values.shape[1])])
        frame.insert(0, 'block', self.block_index)
        frame.insert(0, 't', self.times)
        return frame


def _lu_solve(matrix, rhs):
    """Dense LU solve that refuses numerically singular matrices"""
    if not np.all(np.isfinite(matrix)):
        raise SingularSystemError("system matrix contains non-finite entries")
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)
    threshold = _PIVOT_FACTOR * np.linalg.norm(matrix, np.inf)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if smallest <= threshold:
        raise SingularSystemError(
            f"block system is numerically singular (pivot {smallest:.3e} <= {threshold:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def _interior_times(matrices):
    return np.asarray(matrices.nodes.nodes[1:], dtype=float)


def solve_block_linear(matrices, A, phi, alpha):
    """
    Direct solve of (D kron 1_m - 1_N kron A) xi = -(d kron alpha) + phi

    Args:
        matrices: DiffMatrices of this block
        A: (m, m) matrix (a scalar kappa for m = 1)
        phi: Forcing t -> R^m
        alpha: Initial state of the block

    Returns:
        BlockSolution: iterations is 0
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    m = alpha.size
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape != (m, m):
        raise InvalidProblemError(f"linear part has shape {A.shape}, expected ({m}, {m})")

    t = _interior_times(matrices)
    n = len(t)
    system = np.kron(matrices.interior, np.eye(m)) - np.kron(np.eye(n), A)
    forcing = np.concatenate([np.atleast_1d(np.asarray(phi(tj), dtype=float)) for tj in t])
    if forcing.shape != (n * m,):
        raise InvalidProblemError(f"forcing returned {forcing.size // n} components, expected {m}")
    rhs = forcing - np.kron(matrices.coupling, alpha)

    xi = _lu_solve(system, rhs)
    residual_norm = float(np.linalg.norm(system @ xi - rhs, np.inf))
    stats = SolverStats(rhs_evaluations=n, block_rhs_evaluations=1, linear_solves=1)
    return BlockSolution(xi=xi.reshape(n, m), iterations=0, residual_norm=residual_norm, stats=stats)


def fd_jacobian(rhs, x, t, eps=None, f0=None):
    """
    Forward-difference Jacobian of rhs with respect to x

    Args:
        rhs: f(x, t) returning an array of shape (m,)
        x: State, shape (m,)
        t: Time
        eps: Difference step; None uses sqrt(machine eps) * max(1, |x_j|) per column
        f0: Optional rhs(x, t), saves one evaluation

    Returns:
        numpy.ndarray: (m, m) matrix of (rhs(x + eps e_j, t) - rhs(x, t)) / eps
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if f0 is None:
        f0 = np.atleast_1d(np.asarray(rhs(x, t), dtype=float))
    m = x.size
    jacobian = np.empty((f0.size, m))
    for j in range(m):
        step = eps if eps is not None else np.sqrt(_EPS) * max(1.0, abs(x[j]))
        shifted = x.copy()
        shifted[j] += step
        jacobian[:, j] = (np.atleast_1d(np.asarray(rhs(shifted, t), dtype=float)) - f0) / step
    return jacobian


def _node_jacobians(problem, states, t, f_values, config):
    """Per-node Jacobians and the number of extra rhs evaluations they cost"""
    use_analytic = config.jacobian_mode == JacobianMode.ANALYTIC and problem.jacobian is not None
    blocks = []
    for x, tj, f0 in zip(states, t, f_values):
        if use_analytic:
            blocks.append(np.atleast_2d(np.asarray(problem.jacobian(x, tj), dtype=float)))
        else:
            blocks.append(fd_jacobian(problem.evaluate, x, tj, config.fd_epsilon, f0=f0))
    extra = 0 if use_analytic else len(t) * problem.dimension
    return blocks, extra


def _evaluate_block(problem, xi, t):
    return np.array([problem.evaluate(x, tj) for x, tj in zip(xi, t)])


def solve_block_newton(matrices, problem, alpha, config):
    """
    Newton iteration for D xi - f(xi) = -alpha d

    Starts from xi^(0) with every node equal to alpha and iterates
    (D - Lambda) eta = -(D xi - f(xi) + alpha d), xi <- xi + eta until
    |eta|_inf <= newton_tol * max(1, |xi|_inf).

    Raises:
        NewtonDivergenceError: no convergence within newton_max_iter, or a non-finite iterate
        SingularSystemError: D - Lambda is numerically singular
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    m = alpha.size
    t = _interior_times(matrices)
    n = len(t)

    stacked_d = np.kron(matrices.interior, np.eye(m))
    coupling = np.kron(matrices.coupling, alpha)
    xi = np.tile(alpha, n)

    rhs_evaluations = 0
    jacobian_evaluations = 0
    last_update = np.inf

    for iteration in range(1, config.newton_max_iter + 1):
        f_values = _evaluate_block(problem, xi.reshape(n, m), t)
        rhs_evaluations += n
        if not np.all(np.isfinite(f_values)):
            raise NewtonDivergenceError(f"right-hand side is not finite at Newton iteration {iteration}")
        residual = stacked_d @ xi - f_values.ravel() + coupling

        node_jacobians, extra = _node_jacobians(problem, xi.reshape(n, m), t, f_values, config)
        rhs_evaluations += extra
        jacobian_evaluations += n

        eta = _lu_solve(stacked_d - scipy.linalg.block_diag(*node_jacobians), -residual)
        last_update = float(np.linalg.norm(eta, np.inf))
        converged = last_update <= config.newton_tol * max(1.0, float(np.linalg.norm(xi, np.inf)))
        xi = xi + eta
        if not np.all(np.isfinite(xi)):
            raise NewtonDivergenceError(f"non-finite Newton iterate at iteration {iteration}")

        if converged:
            f_values = _evaluate_block(problem, xi.reshape(n, m), t)
            rhs_evaluations += n
            residual_norm = float(np.linalg.norm(stacked_d @ xi - f_values.ravel() + coupling, np.inf))
            stats = SolverStats(
                rhs_evaluations=rhs_evaluations,
                block_rhs_evaluations=rhs_evaluations // n,
                jacobian_evaluations=jacobian_evaluations,
                linear_solves=iteration,
                newton_iterations=iteration,
            )
            return BlockSolution(xi=xi.reshape(n, m), iterations=iteration,
                                 residual_norm=residual_norm, stats=stats)

    raise NewtonDivergenceError(
        f"Newton did not converge in {config.newton_max_iter} iterations (last update {last_update:.3e})"
    )


@log_execution_time(logger, level=logging.DEBUG)
def march(problem, config):
    """
    Solve the problem block by block across [a, b]

    Each block gets N+1 equispaced nodes whose first node is the previous
    block's last one; its value xi_N seeds the next block.

    Raises:
        BlockFailure: any block error, annotated with the block index
    """
    bounds = config.block_boundaries(problem.a, problem.b)
    n = config.points_per_block
    linear = problem.linear_part is not None and config.use_linear_path

    times, values, indices = [], [], []
    stats = SolverStats()
    alpha = problem.initial

    for index in range(len(bounds) - 1):
        try:
            nodes = equispaced_nodes(bounds[index], bounds[index + 1], n + 1)
            matrices = build(nodes)
            if linear:
                block = solve_block_linear(matrices, problem.linear_part.matrix,
                                           problem.linear_part.forcing, alpha)
            else:
                block = solve_block_newton(matrices, problem, alpha, config)
        except BlockIvpError as e:
            logger.debug(f"{problem.name}: block {index} on [{bounds[index]}, {bounds[index + 1]}] failed: {e}")
            raise BlockFailure(index, e) from e

        logger.debug(
            f"{problem.name}: block {index} iterations={block.iterations} residual={block.residual_norm:.2e}"
        )
        times.append(nodes.nodes[1:])
        values.append(block.xi)
        indices.append(np.full(n, index))
        stats = stats + block.stats
        alpha = block.xi[-1]

    return Trajectory(
        times=np.concatenate(times),
        values=np.vstack(values),
        block_index=np.concatenate(indices),
        problem=problem,
        config=config,
        stats=stats,
    )
