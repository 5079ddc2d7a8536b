"""Parser for `--set key=value` configuration overrides."""

import re
from dataclasses import dataclass
from typing import Any

import yaml

from ..errors import ConfigError

OVERRIDE_PATTERN = re.compile(r"^\s*([A-Za-z_]\w*(?:\.[A-Za-z_]\w*)*)\s*=(.*)$")


@dataclass
class ConfigOverride:
    """A single parsed override."""
    path: tuple[str, ...]
    value: Any

    @property
    def key(self) -> str:
        return ".".join(self.path)


def parse_override(text: str) -> ConfigOverride:
    """Parse one `dotted.key=value` expression.

    Args:
        text: Raw override as given on the command line

    Returns:
        ConfigOverride with the key path and the YAML-decoded value
    """
    match = OVERRIDE_PATTERN.match(text)
    if not match:
        raise ConfigError(f"malformed override {text!r}, expected key=value", key=text)

    key, raw = match.group(1), match.group(2).strip()
    try:
        value = yaml.safe_load(raw) if raw else None
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse value of {key}: {e}", key=key) from e

    return ConfigOverride(path=tuple(key.split(".")), value=value)


def apply_overrides(data: dict[str, Any], overrides: list[ConfigOverride]) -> dict[str, Any]:
    """Apply overrides to a raw configuration mapping, in order."""
    for override in overrides:
        node = data
        for part in override.path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"{override.key}: {part} is not a section", key=override.key)
            node = child
        node[override.path[-1]] = override.value
    return data
