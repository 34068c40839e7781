import logging
from datetime import datetime

from ..config import get_solver_settings
from ..utils.logging import get_logger

# Configure logging
logger = logging.getLogger(__name__)


class BaseService:
    """Base class for the benchmark services, providing common functionality"""

    def __init__(self, settings=None):
        self.settings = dict(settings) if settings is not None else get_solver_settings()
        self.logger = get_logger(f"{__package__}.{type(self).__name__}")

    def solver_setting(self, key, override=None):
        """Return override when given, else the configured default for key"""
        return override if override is not None else self.settings[key]

    def get_timestamp(self):
        """Get current timestamp in ISO format"""
        return datetime.now().isoformat()
