"""
Text and CSV rendering of benchmark results
"""
import math

import numpy as np
import pandas as pd

from .config import OUTPUT_DEFAULTS

CSV_FLOAT_FORMAT = f"%.{OUTPUT_DEFAULTS['significant_digits']}g"


def _sci(value):
    return '-' if pd.isna(value) else f"{value:.6e}"


def _time(value):
    return f"{value:g}"


def _suffix(index, dimension):
    return '' if dimension == 1 else f"_{index + 1}"


def _block_end_rows(trajectory):
    """Index of the last node of every block"""
    blocks = trajectory.block_index
    return np.flatnonzero(np.r_[blocks[1:] != blocks[:-1], True])


def run_frame(result):
    """
    Wide table of a run: one row per reporting time (or per block end when
    nothing was compared) and one column group per component
    """
    m = result.entry.problem.dimension
    report = result.report

    if report is None:
        rows = _block_end_rows(result.trajectory)
        frame = pd.DataFrame({'t': result.trajectory.times[rows]})
        frame['block'] = result.trajectory.block_index[rows]
        for i in range(m):
            frame[f"value{_suffix(i, m)}"] = result.trajectory.values[rows, i]
        return frame

    frame = pd.DataFrame({'t': report.times})
    published = result.entry.published_errors
    for i in range(m):
        sfx = _suffix(i, m)
        frame[f"value{sfx}"] = report.values[:, i]
        frame[f"reference{sfx}"] = report.reference[:, i]
        frame[f"abs_error{sfx}"] = report.pointwise[:, i]
        frame[f"rel_error{sfx}"] = report.relative[:, i]
        if published is not None:
            column = [row[i] for row in published]
            if any(v is not None for v in column):
                frame[f"published{sfx}"] = [np.nan if v is None else v for v in column]
    return frame


def render_run(result):
    """
    Human readable table of a run, with the error norm and solver statistics

    Args:
        result: RunResult from BenchmarkService.run

    Returns:
        str: The rendered report, newline terminated
    """
    entry = result.entry
    config = result.config
    frame = run_frame(result)
    formatters = {column: _sci for column in frame.columns}
    formatters['t'] = _time
    if 'block' in frame:
        formatters['block'] = str

    lines = [
        f"{entry.name}: {entry.title}",
        f"blocks={config.block_count} points={config.points_per_block} compare={result.compare}",
        frame.to_string(index=False, formatters=formatters, na_rep='-'),
    ]
    report = result.report
    if report is not None:
        norm_line = f"||E|| ({report.norm_kind.value}, {report.source}) = {report.norm:.6e}"
        if entry.published_norm is not None:
            norm_line += f"   published = {entry.published_norm:.6e}"
        lines.append(norm_line)
        if not math.isnan(report.max_relative):
            lines.append(f"max relative error = {report.max_relative:.6e}")

    stats = result.trajectory.stats.as_dict()
    lines.append('stats: ' + ' '.join(f"{k}={v}" for k, v in stats.items()))
    lines.append(f"solve time: {result.elapsed:.4f}s")
    return '\n'.join(lines) + '\n'


def csv_frame(result):
    """Long-format frame with the fixed CSV columns"""
    if result.report is not None:
        return result.report.to_frame()

    trajectory = result.trajectory
    rows = _block_end_rows(trajectory)
    values = trajectory.values[rows]
    n_times, m = values.shape
    frame = pd.DataFrame({
        't': np.repeat(trajectory.times[rows], m),
        'component': np.tile(np.arange(1, m + 1), n_times),
        'value': values.ravel(),
        'reference': np.nan,
        'abs_error': np.nan,
    })
    return frame


def write_csv(result, stream):
    """
    Write a run as CSV (t, component, value, reference, abs_error)

    Floats carry 17 significant digits so the file is deterministic and
    round-trips exactly.
    """
    frame = csv_frame(result)[OUTPUT_DEFAULTS['csv_columns']]
    frame.to_csv(stream, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def render_order(entry, estimate):
    """Table of a convergence-order study followed by the estimated order"""
    frame = estimate.to_frame()
    body = frame.to_string(
        index=False,
        formatters={'blocks': str, 'h': _sci, 'error': _sci, 'slope': lambda v: '-' if pd.isna(v) else f"{v:.3f}"},
        na_rep='-',
    )
    if math.isnan(estimate.estimated_order):
        summary = "estimated order = n/a (every refinement pair is at the rounding floor)"
    else:
        summary = f"estimated order = {estimate.estimated_order:.3f}"
    return f"{entry.name}: {entry.title}\n{body}\n{summary}\n"


def render_list(rows):
    """One line per registered benchmark"""
    frame = pd.DataFrame(rows)
    frame['domain'] = frame['domain'].map(lambda d: f"[{d[0]:g}, {d[1]:g}]")
    frame['published_norm'] = frame['published_norm'].map(lambda v: '-' if v is None or pd.isna(v) else f"{v:.4e}")
    return frame.to_string(index=False) + '\n'
