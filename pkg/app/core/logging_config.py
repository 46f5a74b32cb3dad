"""
Logging configuration module.

Sets up structured logging for the application with configurable log levels.
"""
import logging
import sys
from typing import Optional
from app.core.settings import settings


def setup_logging(level: Optional[str] = None):
    """
    Configure application logging with appropriate formatters and handlers.

    Sets up console logging with timestamp, level, and message formatting.
    Log records go to stderr so that JSON reports written to stdout stay
    machine readable.

    Parameters:
        level: Optional level name overriding the LOG_LEVEL setting
    """
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


logger = logging.getLogger(__name__)
