"""
Configuration Package

Import configuration settings from this package.
"""

from .settings import (
    SOLVER_DEFAULTS,
    ORACLE_DEFAULTS,
    OUTPUT_DEFAULTS,
    PACKAGE_NAME,
    PACKAGE_VERSION,
    get_solver_settings,
    get_oracle_steps,
    get_log_level,
)

__all__ = [
    'SOLVER_DEFAULTS',
    'ORACLE_DEFAULTS',
    'OUTPUT_DEFAULTS',
    'PACKAGE_NAME',
    'PACKAGE_VERSION',
    'get_solver_settings',
    'get_oracle_steps',
    'get_log_level',
]
