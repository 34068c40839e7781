"""
Solver and reporting settings

Defaults live in plain dictionaries; a handful can be overridden through
environment variables so batch jobs can tighten tolerances without flags.
"""
import os
import logging

logger = logging.getLogger(__name__)

PACKAGE_NAME = "block-ivp-solver"
PACKAGE_VERSION = "0.1.0"

# Per-block solver defaults
SOLVER_DEFAULTS = {
    'points_per_block': 5,
    'block_count': 1,
    'newton_tol': 1e-12,
    'newton_max_iter': 25,
    'jacobian_mode': 'analytic',
}

# Steps per unit time for the RK4 oracle; default step counts are capped
# at max_total_steps over the whole interval
ORACLE_DEFAULTS = {
    'stiff': 100_000,
    'default': 10_000,
    'max_total_steps': 200_000,
}

OUTPUT_DEFAULTS = {
    'significant_digits': 17,
    'csv_columns': ['t', 'component', 'value', 'reference', 'abs_error'],
    'format': 'table',
}

# Environment variable -> (settings key, converter)
_ENV_OVERRIDES = {
    'BLOCK_IVP_NEWTON_TOL': ('newton_tol', float),
    'BLOCK_IVP_NEWTON_MAX_ITER': ('newton_max_iter', int),
    'BLOCK_IVP_POINTS': ('points_per_block', int),
}


def get_solver_settings():
    """
    Get the solver defaults with environment overrides applied

    Returns:
        dict: A copy of SOLVER_DEFAULTS, updated from BLOCK_IVP_* variables
    """
    settings = dict(SOLVER_DEFAULTS)
    for env_name, (key, convert) in _ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None:
            continue
        try:
            settings[key] = convert(raw)
        except ValueError:
            logger.warning(f"Ignoring {env_name}={raw!r}: not a valid {convert.__name__}")
    return settings


def get_oracle_steps(stiff, span=None):
    """
    Default RK4 steps per unit time for a stiff or non-stiff problem

    Args:
        stiff: Use the stiff rate
        span: Length of the integration interval; when given, the rate is
            lowered so the whole run stays within max_total_steps
    """
    steps = ORACLE_DEFAULTS['stiff'] if stiff else ORACLE_DEFAULTS['default']
    if span is not None and span * steps > ORACLE_DEFAULTS['max_total_steps']:
        steps = max(1, int(ORACLE_DEFAULTS['max_total_steps'] // span))
    return steps


def get_log_level():
    """Console log level from BLOCK_IVP_LOG_LEVEL (default WARNING)"""
    name = os.getenv('BLOCK_IVP_LOG_LEVEL', 'WARNING').upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING
