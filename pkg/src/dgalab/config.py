"""Experiment configuration from flat ``key=value`` files, YAML files and flags.

Precedence: model defaults < file < command-line flags < ``DGALAB_SEED``.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml
from pydantic import ValidationError

from dgalab.models import SWEEP_PREFIX, ExperimentConfig, config_key_paths
from dgalab.utils import flatten_mapping, split_list_value

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "DGALAB_SEED"


class ConfigError(ValueError):
    """Unknown key or invalid value in an experiment configuration."""


def valid_keys() -> list[str]:
    return sorted(config_key_paths())


def _unknown_key(key: str) -> ConfigError:
    return ConfigError(f"Unknown config key '{key}'. Valid keys: {', '.join(valid_keys())}")


def parse_key_values(text: str, origin: str = "<string>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{origin}:{lineno}: expected 'key=value', got '{line}'")
        values[key.strip()] = value.strip()
    return values


def read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    if path.suffix in (".yaml", ".yml"):
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return flatten_mapping(data)
    return parse_key_values(text, str(path))


def parse_flags(args: Sequence[str]) -> dict[str, str]:
    """Parse ``--section.key=value`` / ``--section.key value`` flags."""
    values: dict[str, str] = {}
    items = list(args)
    i = 0
    while i < len(items):
        arg = items[i]
        if not arg.startswith("--"):
            raise ConfigError(f"Unexpected argument '{arg}'")
        key, sep, value = arg[2:].partition("=")
        if not sep:
            if i + 1 >= len(items):
                raise ConfigError(f"Flag '--{key}' needs a value")
            value = items[i + 1]
            i += 1
        values[key] = value
        i += 1
    return values


def _split_sweep(values: Mapping[str, Any]) -> tuple[dict[str, Any], dict[str, list[Any]]]:
    scalars: dict[str, Any] = {}
    sweep: dict[str, list[Any]] = {}
    known = config_key_paths()
    for key, value in values.items():
        if key.startswith(SWEEP_PREFIX):
            axis = key[len(SWEEP_PREFIX) :]
            if axis not in known:
                raise _unknown_key(axis)
            sweep[axis] = split_list_value(value)
        elif key in known:
            scalars[key] = value
        else:
            raise _unknown_key(key)
    return scalars, sweep


def build_config(
    *layers: Mapping[str, Any],
    env: Mapping[str, str] | None = None,
    base: ExperimentConfig | None = None,
) -> ExperimentConfig:
    """Merge flat key layers (later wins) over ``base`` into a validated config."""
    merged: dict[str, Any] = {}
    for layer in layers:
        merged.update(layer)
    env = os.environ if env is None else env
    if env.get(SEED_ENV_VAR):
        logger.info("Seed overridden by %s=%s", SEED_ENV_VAR, env[SEED_ENV_VAR])
        merged["rt.seed"] = env[SEED_ENV_VAR]

    scalars, sweep = _split_sweep(merged)
    try:
        config = (base or ExperimentConfig()).with_overrides(scalars)
        data = config.model_dump(by_alias=True)
        data["sweep"] = {**config.sweep, **sweep}
        config = ExperimentConfig.model_validate(data)
        # every combination that will run must be valid, not just each value
        for _ in config.cells():
            pass
        return config
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def parse_config(
    path: str | Path | None = None,
    flags: Sequence[str] | Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> ExperimentConfig:
    file_values = read_config_file(path) if path is not None else {}
    if flags is None:
        flag_values: Mapping[str, Any] = {}
    elif isinstance(flags, Mapping):
        flag_values = flags
    else:
        flag_values = parse_flags(flags)
    return build_config(file_values, flag_values, env=env)
