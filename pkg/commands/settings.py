"""Configuration resolution: defaults, then a ``key = value`` file, then command-line flags."""
import logging
import os
from pathlib import Path
from typing import Dict, Mapping, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from models.config import TrainingConfig
from training.errors import ConfigError

logger = logging.getLogger(__name__)

LOG_LEVEL_VAR = "ABSA_LOG_LEVEL"
LIST_FIELDS = {"seeds"}


def log_level(default: str = "INFO") -> int:
    """Verbosity from ABSA_LOG_LEVEL, the one environment variable consulted."""
    name = (os.getenv(LOG_LEVEL_VAR) or default).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        logger.warning("Ignoring unknown %s=%s", LOG_LEVEL_VAR, name)
        return logging.getLevelName(default.upper())
    return level


def load_config_file(path) -> Dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file {path} not found")
    values = dotenv_values(path)
    empty = sorted(key for key, value in values.items() if value is None)
    if empty:
        raise ConfigError(f"{path}: keys without a value: {empty}")
    return dict(values)


def _coerce(key: str, raw):
    if key in LIST_FIELDS and isinstance(raw, str):
        return [int(part) for part in raw.replace(" ", "").split(",") if part]
    if isinstance(raw, str) and raw.lower() in ("none", "null", ""):
        return None
    return raw


def resolve_config(path: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None) -> TrainingConfig:
    layered: Dict[str, object] = {}
    if path is not None:
        layered.update(load_config_file(path))
    layered.update({key: value for key, value in (overrides or {}).items() if value is not None})
    unknown = sorted(set(layered) - set(TrainingConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {unknown}")
    try:
        values = {key: _coerce(key, raw) for key, raw in layered.items()}
        return TrainingConfig.model_validate(values)
    except (ValidationError, ValueError) as exc:
        logger.exception("Configuration rejected")
        raise ConfigError(f"invalid configuration: {exc}") from exc
