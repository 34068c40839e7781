"""
Benchmark initial value problems

Five classic test problems with the times at which their errors are
tabulated, the published error norms and, where one exists, the closed-form
solution:

    example1  x' = -100 x + 10                   stiff decay
    example2  x' = 100 x                         fast growth
    example3  x' = 5 e^{5t} (x - t)^2 + 1        nonlinear
    example4  x1' = -0.1 x1 - 199.9 x2,
              x2' = -200 x2                      stiff system
    example5  Lotka-Volterra                     no closed form
"""
import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .solver import IvpProblem, LinearPart
from ..errors import InvalidProblemError, UnknownProblemError

logger = logging.getLogger(__name__)


class NormKind(str, Enum):
    EUCLIDEAN = 'euclidean'
    FROBENIUS = 'frobenius'


@dataclass(frozen=True, eq=False)
class BenchmarkEntry:
    """
    A registered benchmark problem and its published reference data

    Attributes:
        name: Registry identifier
        title: Human readable description
        problem: The IvpProblem
        reporting_times: Times at which errors are tabulated
        published_norm: Published error norm of the block solver, if any
        norm_kind: Euclidean (scalar problems) or Frobenius (systems)
        default_blocks: Uniform block count whose boundaries hit every reporting time
        published_errors: Published per-time error rows (None where a component was not reported)
        stiff: Stiff problems get a finer RK4 oracle by default
    """
    name: str
    title: str
    problem: IvpProblem
    reporting_times: Tuple[float, ...]
    norm_kind: NormKind
    default_blocks: int
    published_norm: Optional[float] = None
    published_errors: Optional[Tuple[Tuple[Optional[float], ...], ...]] = None
    stiff: bool = False

    def __post_init__(self):
        times = np.asarray(self.reporting_times, dtype=float)
        a, b = self.problem.domain
        if times.size == 0 or np.any(np.diff(times) <= 0):
            raise InvalidProblemError(f"{self.name}: reporting times must be strictly increasing")
        if times[0] < a - 1e-12 or times[-1] > b + 1e-12:
            raise InvalidProblemError(f"{self.name}: reporting times leave the domain [{a}, {b}]")
        if self.published_errors is not None and len(self.published_errors) != times.size:
            raise InvalidProblemError(f"{self.name}: one published error row per reporting time")

    @property
    def has_exact(self):
        return self.problem.exact is not None


def _grid(start, stop, count):
    # rounded so that 0.1 + 0.02 style artefacts do not leak into reports
    return tuple(float(v) for v in np.round(np.linspace(start, stop, count), 12))


def _example1():
    def rhs(x, t):
        return -100.0 * x + 10.0

    def jacobian(x, t):
        return np.array([[-100.0]])

    def exact(t):
        return np.array([(1.0 + 9.0 * np.exp(-100.0 * t)) / 10.0])

    problem = IvpProblem(
        dimension=1, rhs=rhs, domain=(0.0, 0.2), initial=[1.0],
        jacobian=jacobian, exact=exact, name='example1',
        linear_part=LinearPart(np.array([[-100.0]]), lambda t: np.array([10.0])),
    )
    return BenchmarkEntry(
        name='example1',
        title="x' = -100x + 10, x(0) = 1 on [0, 0.2]",
        problem=problem,
        reporting_times=_grid(0.0, 0.2, 11),
        norm_kind=NormKind.EUCLIDEAN,
        default_blocks=10,
        published_norm=7.14e-5,
        published_errors=tuple((e,) for e in (
            0.0, 6.88546e-5, 1.86422e-5, 3.78549e-6, 6.83273e-7, 1.15621e-7,
            1.87825e-8, 2.96643e-9, 4.5894e-10, 6.9895e-11, 1.0513e-11,
        )),
        stiff=True,
    )


def _example2():
    def rhs(x, t):
        return 100.0 * x

    def jacobian(x, t):
        return np.array([[100.0]])

    def exact(t):
        return np.array([np.exp(100.0 * t)])

    problem = IvpProblem(
        dimension=1, rhs=rhs, domain=(0.0, 0.1), initial=[1.0],
        jacobian=jacobian, exact=exact, name='example2',
        linear_part=LinearPart(np.array([[100.0]]), lambda t: np.array([0.0])),
    )
    # published column is scaled by 10^2; stored here as absolute errors.
    # Ten blocks of width 0.01 reproduce its final entry; five leave a 2% error at t = 0.1
    return BenchmarkEntry(
        name='example2',
        title="x' = 100x, x(0) = 1 on [0, 0.1]",
        problem=problem,
        reporting_times=_grid(0.0, 0.1, 6),
        norm_kind=NormKind.EUCLIDEAN,
        default_blocks=10,
        published_norm=8.03,
        published_errors=tuple((e,) for e in (
            0.0, 5.35e-4, 7.917e-3, 8.7755e-2, 0.864604, 7.986052,
        )),
    )


def _example3():
    def rhs(x, t):
        return 5.0 * np.exp(5.0 * t) * (x - t) ** 2 + 1.0

    def jacobian(x, t):
        return np.atleast_2d(10.0 * np.exp(5.0 * t) * (x - t))

    def exact(t):
        return np.array([t - np.exp(-5.0 * t)])

    problem = IvpProblem(
        dimension=1, rhs=rhs, domain=(0.0, 1.0), initial=[-1.0],
        jacobian=jacobian, exact=exact, name='example3',
    )
    # blocks of width 0.05; width 0.2 stalls near 2e-6, well above the published norm
    return BenchmarkEntry(
        name='example3',
        title="x' = 5e^(5t)(x - t)^2 + 1, x(0) = -1 on [0, 1]",
        problem=problem,
        reporting_times=_grid(0.2, 1.0, 5),
        norm_kind=NormKind.EUCLIDEAN,
        default_blocks=20,
        published_norm=6.7e-9,
        published_errors=tuple((e,) for e in (
            5.19952e-10, 6.99985e-11, 9.39138e-12, 1.13487e-12, 6.68797e-9,
        )),
    )


_EXAMPLE4_MATRIX = np.array([[-0.1, -199.9], [0.0, -200.0]])


def _example4():
    def rhs(x, t):
        return _EXAMPLE4_MATRIX @ x

    def jacobian(x, t):
        return _EXAMPLE4_MATRIX.copy()

    def exact(t):
        fast = np.exp(-200.0 * t)
        return np.array([np.exp(-0.1 * t) + fast, fast])

    problem = IvpProblem(
        dimension=2, rhs=rhs, domain=(0.0, 50.0), initial=[2.0, 1.0],
        jacobian=jacobian, exact=exact, name='example4',
        linear_part=LinearPart(_EXAMPLE4_MATRIX, lambda t: np.zeros(2)),
    )
    # only the first component was tabulated
    return BenchmarkEntry(
        name='example4',
        title="x1' = -0.1x1 - 199.9x2, x2' = -200x2, x(0) = (2, 1) on [0, 50]",
        problem=problem,
        reporting_times=_grid(10.0, 50.0, 5),
        norm_kind=NormKind.FROBENIUS,
        default_blocks=50,
        published_norm=1.1256e-3,
        published_errors=tuple((e, None) for e in (
            4.3587e-4, 4.3225e-5, 2.3719e-5, 1.1635e-5, 5.351e-6,
        )),
        stiff=True,
    )


def _example5():
    def rhs(x, t):
        return np.array([
            x[0] * (0.76 - 0.45 * x[1]),
            -x[1] * (0.18 - 0.82 * x[0]),
        ])

    def jacobian(x, t):
        return np.array([
            [0.76 - 0.45 * x[1], -0.45 * x[0]],
            [0.82 * x[1], -(0.18 - 0.82 * x[0])],
        ])

    problem = IvpProblem(
        dimension=2, rhs=rhs, domain=(0.0, 1.0), initial=[0.1, 0.1],
        jacobian=jacobian, name='example5',
    )
    # published values are differences against an adaptive explicit solver
    return BenchmarkEntry(
        name='example5',
        title="Lotka-Volterra x1' = x1(0.76 - 0.45x2), x2' = -x2(0.18 - 0.82x1) on [0, 1]",
        problem=problem,
        reporting_times=_grid(0.25, 1.0, 4),
        norm_kind=NormKind.FROBENIUS,
        default_blocks=4,
        published_errors=(
            (7.13490e-9, 1.18070e-9),
            (1.68620e-8, 2.97240e-9),
            (2.93810e-8, 5.61470e-9),
            (4.54880e-8, 9.59720e-9),
        ),
    )


_FACTORIES = {
    'example1': _example1,
    'example2': _example2,
    'example3': _example3,
    'example4': _example4,
    'example5': _example5,
}

_registry = {}
_registry_lock = threading.Lock()


def list_benchmarks():
    """
    Names of all registered benchmarks, in registry order

    Returns:
        list: ['example1', ..., 'example5']
    """
    return list(_FACTORIES)


def get_benchmark(name):
    """
    Look up a benchmark by name

    Args:
        name: One of list_benchmarks()

    Returns:
        BenchmarkEntry: The fully populated entry

    Raises:
        UnknownProblemError: name is not registered
    """
    if name not in _FACTORIES:
        raise UnknownProblemError(
            f"unknown problem {name!r}; choose from {', '.join(_FACTORIES)}"
        )
    with _registry_lock:
        if name not in _registry:
            _registry[name] = _FACTORIES[name]()
            logger.debug(f"Registered benchmark {name}")
        return _registry[name]
