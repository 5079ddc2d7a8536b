"""Loading, validating and echoing YAML run configurations."""

import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from ..errors import ConfigError
from .overrides import apply_overrides, parse_override
from .schemas import ExperimentConfig

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved_config.yaml"


def _describe(error: ValidationError) -> tuple[str, str]:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "<root>"
    return key, first["msg"]


def build_config(data: dict[str, Any] | None, overrides: list[str] | None = None) -> ExperimentConfig:
    """Validate a raw mapping into an ExperimentConfig.

    Args:
        data: Parsed configuration mapping (None for all defaults)
        overrides: `key=value` strings applied on top of the mapping

    Returns:
        Validated configuration
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")

    data = apply_overrides(data, [parse_override(o) for o in overrides or []])
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        key, message = _describe(e)
        raise ConfigError(f"invalid configuration key {key}: {message}", key=key) from e


def load_config(path: str | Path | None, overrides: list[str] | None = None) -> ExperimentConfig:
    """Read a YAML configuration file (or defaults when path is None)."""
    data: dict[str, Any] | None = None
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"cannot parse {path}: {e}") from e
        logger.debug("Loaded configuration from %s", path)
    return build_config(data, overrides)


def dump_config(config: ExperimentConfig, out_dir: str | Path) -> Path:
    """Write the fully resolved configuration into the output directory."""
    target = Path(out_dir) / RESOLVED_CONFIG_NAME
    with open(target, "w", encoding="utf-8") as f:
        yaml.safe_dump(config.model_dump(mode="json"), f, sort_keys=False)
    return target
