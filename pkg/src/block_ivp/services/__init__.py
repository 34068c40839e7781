"""
Service layer combining the numerical core into benchmark runs
"""

from .base_service import BaseService
from .reference_service import ReferenceService
from .benchmark_service import BenchmarkService, RunResult

__all__ = ['BaseService', 'ReferenceService', 'BenchmarkService', 'RunResult']
