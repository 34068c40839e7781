"""
Error analysis for the block solver

- rk4_reference: a fixed-step classical Runge-Kutta oracle
- error_report: pointwise and aggregate errors at the tabulated times
- empirical_order: convergence order from successive block halvings
- stability_probe: sensitivity of the trajectory to the initial value
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from .problems import NormKind
from .solver import Trajectory, SolverStats, march
from ..errors import InvalidConfigError, MissingReferenceError, NonFiniteStateError

logger = logging.getLogger(__name__)

# Errors below this carry no slope information
DEGENERATE_ERROR = 1e-14


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """
    Errors of a trajectory at the reporting times

    Attributes:
        times: Reporting times
        values: Approximate states, shape (T, m)
        reference: Reference states, shape (T, m)
        pointwise: |values - reference|
        relative: pointwise / |reference| (NaN where the reference is 0)
        norm: sqrt of the sum of squared pointwise errors (Euclidean for m = 1,
            Frobenius over times x components otherwise)
        norm_kind: Which of the two the norm is reported as
        source: 'exact' or 'oracle'
    """
    times: np.ndarray
    values: np.ndarray
    reference: np.ndarray
    pointwise: np.ndarray
    relative: np.ndarray
    norm: float
    norm_kind: NormKind
    source: str = 'exact'

    @property
    def max_relative(self):
        finite = self.relative[np.isfinite(self.relative)]
        return float(finite.max()) if finite.size else float('nan')

    def to_frame(self):
        """One row per (time, component): t, component, value, reference, abs_error"""
        n_times, m = self.values.shape
        return pd.DataFrame({
            't': np.repeat(self.times, m),
            'component': np.tile(np.arange(1, m + 1), n_times),
            'value': self.values.ravel(),
            'reference': self.reference.ravel(),
            'abs_error': self.pointwise.ravel(),
        })


@dataclass(frozen=True, eq=False)
class OrderEstimate:
    """
    Measured convergence behaviour under block halving

    Attributes:
        block_counts: M for each run
        step_sizes: Node spacing h for each run (strictly decreasing)
        errors: Error norm of each run at the coarsest grid's block ends
        slopes: log(e_i / e_{i+1}) / log(h_i / h_{i+1}); NaN for degenerate pairs
        degenerate: True where an error of the pair fell below 1e-14
        estimated_order: Median of the non-degenerate slopes (NaN if none)
    """
    block_counts: Tuple[int, ...]
    step_sizes: np.ndarray
    errors: np.ndarray
    slopes: np.ndarray
    degenerate: np.ndarray
    estimated_order: float

    @property
    def is_degenerate(self):
        return bool(np.all(self.degenerate))

    def to_frame(self):
        slopes = np.concatenate([[np.nan], self.slopes])
        return pd.DataFrame({
            'blocks': self.block_counts,
            'h': self.step_sizes,
            'error': self.errors,
            'slope': slopes,
        })


def _rk4(problem, n_steps):
    a, b = problem.domain
    step = (b - a) / n_steps
    rhs = problem.rhs
    times = a + step * np.arange(1, n_steps + 1)
    times[-1] = b
    values = np.empty((n_steps, problem.dimension))

    x = np.array(problem.initial, dtype=float)
    t = a
    for k in range(n_steps):
        k1 = np.asarray(rhs(x, t), dtype=float)
        k2 = np.asarray(rhs(x + 0.5 * step * k1, t + 0.5 * step), dtype=float)
        k3 = np.asarray(rhs(x + 0.5 * step * k2, t + 0.5 * step), dtype=float)
        k4 = np.asarray(rhs(x + step * k3, t + step), dtype=float)
        x = x + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if not np.all(np.isfinite(x)):
            raise NonFiniteStateError(
                f"RK4 oracle for {problem.name!r} overflowed at t={t + step:.6g}; use more steps"
            )
        values[k] = x
        t = a + (k + 1) * step

    return Trajectory(
        times=times,
        values=values,
        block_index=np.zeros(n_steps, dtype=int),
        problem=problem,
        stats=SolverStats(rhs_evaluations=4 * n_steps),
    )


def rk4_reference(problem, steps_per_unit, align=1):
    """
    Classical fixed-step RK4 solution used as an independent oracle

    Args:
        problem: The IvpProblem
        steps_per_unit: Steps per unit time; the step is (b - a) / ceil((b - a) * steps_per_unit)
        align: Round the step count up to a multiple of this, so that the
            boundaries of `align` uniform blocks fall on oracle nodes

    Returns:
        Trajectory: Oracle values at every step

    Raises:
        NonFiniteStateError: the integration overflowed
    """
    if steps_per_unit < 1:
        raise InvalidConfigError(f"steps_per_unit must be >= 1, got {steps_per_unit}")
    if align < 1:
        raise InvalidConfigError(f"align must be >= 1, got {align}")
    a, b = problem.domain
    # round first: 0.2 * 1e5 is 20000.000000000004 in floating point
    n_steps = max(1, math.ceil(round((b - a) * steps_per_unit, 9)))
    n_steps = math.ceil(n_steps / align) * align
    logger.debug(f"RK4 oracle for {problem.name}: {n_steps} steps")
    return _rk4(problem, n_steps)


def _reference_values(problem, times, reference):
    if reference is None or (isinstance(reference, str) and reference == 'exact'):
        if problem.exact is None:
            raise MissingReferenceError(f"{problem.name!r} has no closed-form solution; pass an oracle")
        return np.array([problem.exact_at(t) for t in times]), 'exact'
    if isinstance(reference, Trajectory):
        return reference.values_at(times), 'oracle'
    if callable(reference):
        return np.array([np.atleast_1d(np.asarray(reference(t), dtype=float)) for t in times]), 'exact'
    raise MissingReferenceError(f"unsupported reference {reference!r}")


def error_report(trajectory, entry, reference=None):
    """
    Absolute errors of a trajectory at the entry's reporting times

    Args:
        trajectory: Solver output covering every reporting time
        entry: BenchmarkEntry supplying reporting times and norm kind
        reference: None or 'exact' for the closed form, an oracle
            Trajectory, or any callable t -> R^m

    Raises:
        MissingNodeError: a reporting time is not a trajectory node
        MissingReferenceError: exact requested but unavailable
    """
    times = np.asarray(entry.reporting_times, dtype=float)
    values = trajectory.values_at(times)
    ref, source = _reference_values(entry.problem, times, reference)

    pointwise = np.abs(values - ref)
    with np.errstate(divide='ignore', invalid='ignore'):
        relative = np.where(ref != 0.0, pointwise / np.abs(ref), np.nan)
    norm = float(np.sqrt(np.sum(pointwise ** 2)))

    return ErrorReport(
        times=times,
        values=values,
        reference=ref,
        pointwise=pointwise,
        relative=relative,
        norm=norm,
        norm_kind=entry.norm_kind,
        source=source,
    )


def empirical_order(problem, base_config, refinements, reference=None, oracle_steps=None, workers=1):
    """
    Estimate the convergence order by doubling the block count

    Runs march with M, 2M, 4M, ... blocks (refinements runs in total) and
    measures each run at the block ends of the coarsest grid.

    Args:
        problem: Problem with a closed form, or one an oracle can integrate
        base_config: Config of the coarsest run
        refinements: Number of runs, at least 2
        reference: Optional reference (see error_report); defaults to the
            closed form, else an RK4 oracle
        oracle_steps: Oracle steps per unit time when one is needed (default 10^4)
        workers: Run the refinements in a thread pool of this size

    Returns:
        OrderEstimate
    """
    if int(refinements) != refinements or refinements < 2:
        raise InvalidConfigError(f"need at least 2 refinement runs for a slope, got {refinements}")

    a, b = problem.domain
    coarse = replace(base_config, boundaries=None) if base_config.boundaries is not None else base_config
    checkpoints = np.linspace(a, b, coarse.block_count + 1)[1:]

    if reference is None and problem.exact is None:
        reference = rk4_reference(problem, oracle_steps or 10_000, align=coarse.block_count)
    ref, _ = _reference_values(problem, checkpoints, reference)

    configs = [replace(coarse, block_count=coarse.block_count * 2 ** i) for i in range(refinements)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(lambda c: march(problem, c), configs))
    else:
        trajectories = [march(problem, c) for c in configs]

    errors = np.array([
        float(np.sqrt(np.sum((traj.values_at(checkpoints) - ref) ** 2))) for traj in trajectories
    ])
    steps = np.array([(b - a) / (c.block_count * c.points_per_block) for c in configs])

    slopes = np.full(refinements - 1, np.nan)
    degenerate = np.zeros(refinements - 1, dtype=bool)
    for i in range(refinements - 1):
        if errors[i] < DEGENERATE_ERROR or errors[i + 1] < DEGENERATE_ERROR:
            degenerate[i] = True
            continue
        slopes[i] = math.log(errors[i] / errors[i + 1]) / math.log(steps[i] / steps[i + 1])

    finite = slopes[~degenerate]
    estimated = float(np.median(finite)) if finite.size else float('nan')
    if degenerate.any():
        logger.warning(
            f"{problem.name}: {int(degenerate.sum())} of {refinements - 1} refinement pairs hit the "
            f"rounding floor; their slopes are excluded"
        )
    logger.debug(f"{problem.name}: errors={errors} slopes={slopes} order={estimated:.3f}")

    return OrderEstimate(
        block_counts=tuple(c.block_count for c in configs),
        step_sizes=steps,
        errors=errors,
        slopes=slopes,
        degenerate=degenerate,
        estimated_order=estimated,
    )


def stability_probe(problem, config, delta):
    """
    Amplification of an initial perturbation: |traj(alpha + delta) - traj(alpha)|_inf / delta

    Every component of alpha is shifted by delta.
    """
    if not delta > 0:
        raise InvalidConfigError(f"delta must be > 0, got {delta}")
    base = march(problem, config)
    perturbed = march(problem.with_initial(problem.initial + delta), config)
    return float(np.max(np.abs(perturbed.values - base.values)) / delta)
