from __future__ import annotations

import os
from collections.abc import Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from toric_fsig.exceptions import ConfigurationError

WORKERS_ENV_VAR = "TORIC_FSIG_THREADS"
LOG_LEVEL_ENV_VAR = "TORIC_FSIG_LOG_LEVEL"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    workers: int = Field(default=1, ge=1)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        if value not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return value


def get_settings(environ: Mapping[str, str] | None = None) -> Settings:
    """
    Read settings from the environment
    Args:
        environ: mapping to read from, defaults to os.environ

    Returns:
        Parsed settings

    Raises:
        ConfigurationError: if a variable is set to an unusable value
    """
    env = os.environ if environ is None else environ
    values: dict[str, str] = {}
    if env.get(WORKERS_ENV_VAR):
        values["workers"] = env[WORKERS_ENV_VAR]
    if env.get(LOG_LEVEL_ENV_VAR):
        values["log_level"] = env[LOG_LEVEL_ENV_VAR].upper()
    try:
        return Settings.model_validate(values)
    except ValidationError as e:
        raise ConfigurationError(
            f"invalid {WORKERS_ENV_VAR} or {LOG_LEVEL_ENV_VAR}: {e.errors()[0]['msg']}"
        ) from e
