"""
Configuration management for the mooncat laboratory.
"""

from mooncat.config.loader import ConfigLoader
from mooncat.config.defaults import CONFIG_DEFAULTS, get_default, get_type
from mooncat.config.run_config import COMMANDS, RunConfig

__all__ = [
    "ConfigLoader",
    "CONFIG_DEFAULTS",
    "get_default",
    "get_type",
    "COMMANDS",
    "RunConfig",
]
