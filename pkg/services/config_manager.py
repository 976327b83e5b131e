import copy
import os
from typing import Any
import yaml
from exceptions import InvalidConfigException
from services.printr import Printr

SYSTEM_CONFIG_PATH = "configs/system"
DEFAULT_CONFIG = "defaults.yaml"


class ConfigManager:
    def __init__(self, app_root_path: str):
        self.printr = Printr()
        self.system_config_path: str = os.path.join(app_root_path, SYSTEM_CONFIG_PATH)
        self.defaults = self.__read_config_file(
            os.path.join(self.system_config_path, DEFAULT_CONFIG)
        )

    def __read_config_file(self, config_file: str) -> dict[str, Any]:
        parsed_config = {}

        if os.path.exists(config_file) and os.path.isfile(config_file):
            with open(config_file, "r", encoding="UTF-8") as stream:
                try:
                    parsed_config = yaml.safe_load(stream) or {}
                except yaml.YAMLError as e:
                    raise InvalidConfigException(
                        f"Could not load config ({config_file})!\n{str(e)}"
                    ) from e
        else:
            self.printr.print_warn(f"Config file '{config_file}' not found, skipping.")

        if not isinstance(parsed_config, dict):
            raise InvalidConfigException(
                f"Config ({config_file}) must contain a mapping at the top level."
            )
        return parsed_config

    def get_config(
        self, user_config_file: str | None = None, overrides: dict[str, Any] | None = None
    ) -> dict[str, Any]:
        """Defaults, deep-merged with the user's file, deep-merged with CLI overrides."""
        config = copy.deepcopy(self.defaults)
        if user_config_file:
            if not os.path.isfile(user_config_file):
                raise FileNotFoundError(f"Could not find config file '{user_config_file}'")
            deep_merge(config, self.__read_config_file(user_config_file))
        if overrides:
            deep_merge(config, {k: v for k, v in overrides.items() if v is not None})
        return config


def deep_merge(source: dict, updates: dict) -> dict:
    """Recursively merges updates into source."""
    for key, value in updates.items():
        if isinstance(value, dict):
            node = source.setdefault(key, {})
            deep_merge(node, value)
        else:
            source[key] = value
    return source
