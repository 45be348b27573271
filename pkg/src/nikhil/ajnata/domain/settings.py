"""
Base model for all Ajnata configuration objects

Configuration sections are pydantic models. Construction through
``AjnataSettings.parse`` turns pydantic's ValidationError into a
ConfigurationError that names every offending dotted key.
"""

from typing import Any, Dict, Type, TypeVar

from pydantic import BaseModel, ConfigDict, ValidationError

from nikhil.ajnata.domain.exceptions import ConfigurationError

SettingsT = TypeVar("SettingsT", bound="AjnataSettings")


def describe_validation_error(error: ValidationError, prefix: str = "") -> str:
    """Render a pydantic error as one 'key: message' line per problem"""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ()))
        if prefix:
            location = f"{prefix}.{location}" if location else prefix
        message = item.get("msg", "invalid value")
        # pydantic prefixes messages of ValueErrors raised in validators
        message = message.removeprefix("Value error, ")
        lines.append(f"{location or '<root>'}: {message}")
    return "\n".join(lines)


class AjnataSettings(BaseModel):
    """Frozen, strict-keyed configuration model"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @classmethod
    def parse(cls: Type[SettingsT], data: Dict[str, Any], prefix: str = "") -> SettingsT:
        """Validate a raw mapping, raising ConfigurationError on any violation"""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(describe_validation_error(e, prefix)) from e
