from pathlib import Path
from typing import Any, Dict

import yaml

from nikhil.ajnata.domain.exceptions import ConfigurationError


class YamlUtils:

    @staticmethod
    def yaml_safe_load(config_path: Path) -> Dict[str, Any]:
        """Loads a YAML mapping, reporting parse errors with line and column."""
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigurationError(f"Configuration file not found at '{config_path}'")
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            problem = getattr(e, 'problem', None) or str(e)
            if mark is not None:
                raise ConfigurationError(
                    f"{config_path}:{mark.line + 1}:{mark.column + 1}: could not parse YAML ({problem})"
                )
            raise ConfigurationError(f"{config_path}: could not parse YAML ({problem})")

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{config_path}: top level must be a mapping of sections")
        return data

    @staticmethod
    def yaml_safe_dump(data: Dict[str, Any], file_path: Path) -> Path:
        """Writes a mapping as block-style YAML, keys in insertion order."""
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            yaml.safe_dump(data, f, sort_keys=False, default_flow_style=False, allow_unicode=True)
        return file_path
