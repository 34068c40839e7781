from .logging_utils import setup_logging, get_logger, log_execution_time, format_with_context, LogGroup

__all__ = ['setup_logging', 'get_logger', 'log_execution_time', 'format_with_context', 'LogGroup']
