"""
File-based configuration loader for the mooncat laboratory.

This module loads run configuration from an INI file. Each CLI subcommand
reads its own section; shared settings (log level, seed, threads) live in
the [Common] section.
"""

import configparser
from pathlib import Path
from typing import Dict, List, Optional

from mooncat.config.defaults import get_default
from mooncat.exceptions import ConfigError


class ConfigLoader:
    """
    Load configuration from an INI file.

    Attributes:
        config_file: Path of the loaded file (None for an empty configuration)
        log_level: Log level name from [Common]
        seed: Base seed from [Common]
        threads: Worker count from [Common] (0 means all cores)
    """

    def __init__(self, config_file: Optional[str] = None, must_exist: bool = True):
        """
        Initialize the configuration loader.

        Args:
            config_file: Path to the INI configuration file, or None
            must_exist: Raise ConfigError when the file is missing
        """
        self.config_file = config_file
        self.config = configparser.ConfigParser()
        self.config.optionxform = str  # keys are case-sensitive (K4, E_Ca)

        if config_file is not None:
            if not Path(config_file).is_file():
                if must_exist:
                    raise ConfigError(f"configuration file not found: {config_file}")
            else:
                try:
                    self.config.read(config_file)
                except configparser.Error as exc:
                    raise ConfigError(f"cannot parse {config_file}: {exc}") from exc

        self._load_common_config()

    @classmethod
    def from_string(cls, text: str) -> "ConfigLoader":
        """Build a loader from INI text (used by tests and embedded templates)."""
        loader = cls(config_file=None)
        try:
            loader.config.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse configuration text: {exc}") from exc
        loader._load_common_config()
        return loader

    def _load_common_config(self) -> None:
        """Load the shared [Common] settings."""
        self.log_level: str = self.get("Common", "log_level", fallback=get_default("log_level"))
        self.seed: int = self.getint("Common", "seed", fallback=get_default("seed"))
        self.threads: int = self.getint("Common", "threads", fallback=get_default("threads"))

    def get_log_level(self) -> str:
        """Return the configured log level name."""
        return str(self.log_level).upper()

    def has_section(self, section: str) -> bool:
        """Return True when the section is present."""
        return self.config.has_section(section)

    def section(self, section: str) -> Dict[str, str]:
        """Return a section's raw key/value pairs (empty when absent)."""
        if not self.config.has_section(section):
            return {}
        return dict(self.config.items(section))

    def sections(self) -> List[str]:
        """Return the section names in file order."""
        return self.config.sections()

    def get(self, section: str, key: str, fallback: Optional[str] = None) -> Optional[str]:
        """
        Get a configuration value.

        Args:
            section: INI file section name
            key: Configuration key within the section
            fallback: Default value if key is not found

        Returns:
            Configuration value or fallback
        """
        return self.config.get(section, key, fallback=fallback)

    def getint(self, section: str, key: str, fallback: Optional[int] = None) -> Optional[int]:
        """
        Get an integer configuration value.

        Raises:
            ConfigError: If the value is present but not an integer
        """
        try:
            return self.config.getint(section, key, fallback=fallback)
        except ValueError as exc:
            raise ConfigError("expected an integer", key=f"{section}.{key}") from exc

    def getfloat(
        self, section: str, key: str, fallback: Optional[float] = None
    ) -> Optional[float]:
        """
        Get a float configuration value.

        Raises:
            ConfigError: If the value is present but not a number
        """
        try:
            return self.config.getfloat(section, key, fallback=fallback)
        except ValueError as exc:
            raise ConfigError("expected a number", key=f"{section}.{key}") from exc

    def getboolean(
        self, section: str, key: str, fallback: Optional[bool] = None
    ) -> Optional[bool]:
        """
        Get a boolean configuration value.

        Raises:
            ConfigError: If the value is present but not a boolean
        """
        try:
            return self.config.getboolean(section, key, fallback=fallback)
        except ValueError as exc:
            raise ConfigError("expected a boolean", key=f"{section}.{key}") from exc
