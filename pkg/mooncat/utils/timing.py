"""
Timing decorator for the mooncat laboratory.

Wraps the expensive numerical entry points (Liouvillian eigen-solves,
integrations, Monte Carlo runs, campaigns) so that sweeps can report where
their wall time goes.
"""

import time
from functools import wraps
from typing import Any, Callable, Optional


def time_it(func: Callable) -> Callable:
    """
    Decorator to measure and log function execution time.

    Logs at INFO level when a logger is passed via the 'logger' keyword
    argument; silent otherwise.

    Args:
        func: Function to wrap with timing measurement

    Returns:
        Wrapped function that logs execution time

    Example:
        @time_it
        def spectral_gap_rate(L, sector, logger=None):
            ...

        spectral_gap_rate(L, "bitflip", logger=my_logger)
    """
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        logger: Optional[Any] = kwargs.get("logger")

        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed_time = time.perf_counter() - start_time

        if logger:
            logger.info(f"{func.__name__} executed in {elapsed_time:.3f} seconds")

        return result

    return wrapper
