"""
Time utilities module.

Provides helper functions for timestamps and wall-clock timings.
"""
import time
from datetime import datetime, timezone


def utc_now() -> datetime:
    """
    Get current UTC datetime.

    Returns:
        Current datetime in UTC timezone
    """
    return datetime.now(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """
    Format datetime as ISO 8601 string.

    Parameters:
        dt: Datetime object to format

    Returns:
        ISO 8601 formatted string
    """
    return dt.isoformat()


class Stopwatch:
    """
    Context manager measuring elapsed wall-clock seconds.

    Usage:
        with Stopwatch() as sw:
            ...
        sw.seconds
    """

    def __init__(self):
        self.seconds = 0.0
        self._start = 0.0

    def __enter__(self) -> "Stopwatch":
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> bool:
        self.seconds = time.perf_counter() - self._start
        return False
