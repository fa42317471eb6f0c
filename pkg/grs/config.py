"""
Configuration settings for grs-toolkit.
Manages tolerances, seeds, the quotient enumeration cap and report output.
"""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings

from grs.exceptions import ConfigError

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings with environment variable support (prefix GRS_)."""

    # Application
    APP_NAME: str = "grs-toolkit"
    LOG_LEVEL: str = "WARNING"

    # Numerics
    TOLERANCE: float = 1e-9
    FLOAT_TOLERANCE: float = 1e-12
    SEED: int = 0

    # Algebra
    QUOTIENT_CAP: int = 1024
    CLOSURE_FACTOR: int = 10

    # Execution
    MAX_WORKERS: int = 1
    OUTPUT_PATH: Optional[Path] = None

    class Config:
        env_file = ".env"
        env_prefix = "GRS_"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()


class RunConfig(BaseModel):
    """Per-invocation configuration resolved from defaults, file, env and flags."""

    tolerance: float = Field(default=1e-9, gt=0)
    seed: int = 0
    quotient_cap: int = Field(default=1024, ge=1)
    output_path: Optional[Path] = None
    max_workers: int = Field(default=1, ge=1)


# Settings field -> RunConfig field
_FIELD_MAP = {
    "TOLERANCE": "tolerance",
    "SEED": "seed",
    "QUOTIENT_CAP": "quotient_cap",
    "OUTPUT_PATH": "output_path",
    "MAX_WORKERS": "max_workers",
}


def _read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}", element=str(path))
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object", element=str(path))
    unknown = sorted(set(data) - set(_FIELD_MAP.values()))
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}", element=unknown[0])
    return data


def load_run_config(
    config_file: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
    env_settings: Optional[Settings] = None,
) -> RunConfig:
    """
    Resolve a RunConfig.

    Precedence, lowest first: defaults, JSON config file, GRS_* environment,
    explicit overrides (CLI flags). Overrides equal to None are ignored.
    """
    env_settings = env_settings or Settings()
    values: Dict[str, Any] = {
        run_key: getattr(env_settings, env_key) for env_key, run_key in _FIELD_MAP.items()
    }

    if config_file is not None:
        from_env = {_FIELD_MAP[k] for k in env_settings.model_fields_set if k in _FIELD_MAP}
        for key, value in _read_config_file(Path(config_file)).items():
            if key not in from_env:
                values[key] = value
        logger.debug(f"Config file {config_file} applied; env kept for {sorted(from_env)}")

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    try:
        return RunConfig(**values)
    except ValidationError as e:
        first = e.errors()[0]
        field_name = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"Invalid configuration for '{field_name}': {first['msg']}", element=field_name)
