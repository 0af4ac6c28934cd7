"""
Logging configuration for the mooncat laboratory.

This module provides centralized logger setup with support for:
- File-based logging with rotation for long sweeps
- Console logging for interactive runs
- Log level taken from the [Common] section of the run configuration
"""

import logging
from logging.handlers import RotatingFileHandler

LOGGER_NAME = "MoonCatLogger"


def setup_logger(
    config_loader,
    log_to_file: bool = False,
    file_name: str = "mooncat.log"
) -> logging.Logger:
    """
    Set up and configure the laboratory logger.

    Library modules log under ``mooncat.*``; their records propagate to the
    handlers attached here.

    Args:
        config_loader: Configuration loader with get_log_level() method
        log_to_file: If True, log to a rotating file; otherwise to the console
        file_name: Log file path (used when log_to_file is True)

    Returns:
        Configured Logger instance
    """
    level = config_loader.get_log_level()

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    package_logger = logging.getLogger("mooncat")
    package_logger.setLevel(level)

    # Avoid duplicate records when a run is configured twice in one process
    for target in (logger, package_logger):
        if target.hasHandlers():
            target.handlers.clear()

    if log_to_file:
        handler = RotatingFileHandler(
            file_name,
            maxBytes=5 * 1024 * 1024,  # 5 MB per file
            backupCount=3
        )
    else:
        handler = logging.StreamHandler()

    formatter = logging.Formatter(
        "%(asctime)s - %(levelname)s - %(message)s"
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    package_logger.addHandler(handler)

    return logger
