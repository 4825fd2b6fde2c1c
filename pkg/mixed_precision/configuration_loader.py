"""
Centralized Configuration Loader Service.

This module is the only place that reads the environment or run-config
files. Everything else receives plain dictionaries through constructors.
"""

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, Union

from .errors import ConfigError

DEFAULT_OUTPUT_DIRECTORY = "./runs"
DEFAULT_LOG_LEVEL = "INFO"


class ConfigurationLoader:
    """
    Centralized configuration loader reading environment variables and JSON
    run-config files.
    """

    @staticmethod
    def load_configuration() -> Dict[str, Any]:
        """
        Load configuration from environment variables.

        Returns:
            Dict[str, Any]: ``output_directory`` and ``log_level``
        """
        return {
            "output_directory": os.getenv("MPQ_OUTPUT_DIR", DEFAULT_OUTPUT_DIRECTORY),
            "log_level": os.getenv("MPQ_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper(),
        }

    @staticmethod
    def load_from_file(config_file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Load a JSON run configuration.

        Args:
            config_file_path: Path to the configuration file

        Returns:
            Dict[str, Any]: The parsed document

        Raises:
            ConfigError: If the file is unreadable or not a JSON object
        """
        path = Path(config_file_path)
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e.strerror or e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from e
        if not isinstance(document, dict):
            raise ConfigError(f"{path} must contain a JSON object, got {type(document).__name__}")
        return document

    @staticmethod
    def merge_configurations(*configs: Dict[str, Any]) -> Dict[str, Any]:
        """
        Deep-merge configuration dictionaries; later ones override earlier ones.

        Args:
            *configs: Configuration dictionaries to merge

        Returns:
            Dict[str, Any]: Merged configuration
        """
        merged: Dict[str, Any] = {}
        for config in configs:
            if not config:
                continue
            for key, value in config.items():
                if isinstance(value, dict) and isinstance(merged.get(key), dict):
                    merged[key] = ConfigurationLoader.merge_configurations(merged[key], value)
                else:
                    merged[key] = copy.deepcopy(value)
        return merged
