"""Registry of the preconfigured scenarios."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from ..config.loader import build_config
from ..config.schemas import ExperimentConfig

DATA_FILE = Path(__file__).parent / "scenarios.yaml"


@dataclass
class Scenario:
    """A named experiment, optionally swept over configuration variants."""
    name: str
    description: str
    config: dict[str, Any]
    variants: list[dict[str, Any]] = field(default_factory=list)

    def configs(self, overrides: list[str] | None = None) -> list[tuple[str | None, ExperimentConfig]]:
        """Resolved configurations, with the sub-directory name of each variant.

        Args:
            overrides: `key=value` strings applied after the variant settings

        Returns:
            (None, config) for plain scenarios, (variant label, config) otherwise
        """
        if not self.variants:
            return [(None, build_config(_copy(self.config), overrides))]
        resolved = []
        for variant in self.variants:
            settings = [f"{key}={value}" for key, value in variant.items()]
            label = "_".join(f"{key.split('.')[-1]}{value}" for key, value in variant.items())
            resolved.append((label, build_config(_copy(self.config), settings + (overrides or []))))
        return resolved


def _copy(data: dict[str, Any]) -> dict[str, Any]:
    return yaml.safe_load(yaml.safe_dump(data))


def load_scenarios() -> dict[str, Scenario]:
    """Load the scenario registry from its YAML file."""
    with open(DATA_FILE, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    return {
        name: Scenario(
            name=name,
            description=entry["description"],
            config=entry.get("config", {}),
            variants=entry.get("variants", []),
        )
        for name, entry in raw.items()
    }


def list_scenarios() -> list[str]:
    return list(load_scenarios())


def get_scenario(name: str) -> Scenario | None:
    return load_scenarios().get(name)
