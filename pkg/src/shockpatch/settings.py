"""Application settings and run-configuration loading."""

from __future__ import annotations

import atexit
from contextlib import ExitStack
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Literal

import orjson
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from shockpatch.logging import configure_logger, get_logger
from shockpatch.typing.config import RunConfig


_RESOURCE_STACK = ExitStack()
atexit.register(_RESOURCE_STACK.close)


@lru_cache(maxsize=1)
def _resources_dir() -> Path:
    """Return the on-disk path to the bundled resources directory."""
    resource = resources.files("shockpatch") / "resources"
    return _RESOURCE_STACK.enter_context(resources.as_file(resource))


def example_config_path(number: int) -> Path:
    """Return the bundled run configuration of a built-in example.

    Args:
        number (int): Example number (1, 2 or 3).

    Raises:
        FileNotFoundError: if no example with that number is bundled.

    Returns:
        Path: Location of the example JSON document.
    """
    candidate = _resources_dir() / "examples" / f"example-{number}.json"
    if not candidate.is_file():
        raise FileNotFoundError(f"Built-in example {number} not found.")
    return candidate


class ShockpatchSettings(BaseSettings):
    """Process-wide settings, read from ``SHOCKPATCH_*`` environment variables.

    log_level: Logging level for the application.
    human_readable_logs: Render console logs for humans instead of JSON lines.
    out_dir: Default directory receiving run outputs.
    parallel_compare: Run the full-domain and patch simulations of compare mode
        in two worker processes.
    progress_every: Accepted integrator steps between progress log lines.
    """

    model_config = SettingsConfigDict(env_prefix="SHOCKPATCH_", extra="forbid")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO", description="Logging level for the application."
    )
    human_readable_logs: bool = Field(
        default=True, description="Render console logs for humans."
    )
    out_dir: Path = Field(
        default=Path("runs"), description="Default directory for run outputs."
    )
    parallel_compare: bool = Field(
        default=False,
        description="Run both simulations of compare mode in worker processes.",
    )
    progress_every: int = Field(
        default=50_000, gt=0, description="Accepted steps between progress logs."
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        """Validate the log level value.

        Args:
            value (str): The log level value to validate.

        Raises:
            ValueError: If the log level is not valid.

        Returns:
            str: The validated log level.
        """
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR"}
        upper_value = str(value).upper()
        if upper_value not in valid_levels:
            raise ValueError(
                f"Invalid log level: {value}. Must be one of {valid_levels}."
            )
        return upper_value


def _load_raw_config(config_path: Path) -> dict[str, Any]:
    """Load the json file into a python dictionary.

    Args:
        config_path (Path): The path to the configuration file.

    Raises:
        ValueError: If the configuration file is missing or not valid JSON.

    Returns:
        dict[str, Any]: The loaded configuration data.
    """
    if not config_path.is_file():
        raise ValueError(f"Configuration file not found: {config_path}")
    try:
        raw_config = orjson.loads(config_path.read_bytes())
    except orjson.JSONDecodeError as exc:
        raise ValueError(f"Invalid JSON in {config_path}: {exc}") from exc
    if not isinstance(raw_config, dict):
        raise ValueError(f"Invalid JSON in {config_path}: expected an object")
    return raw_config


def _describe_validation_error(exc: ValidationError) -> str:
    details = "; ".join(
        f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
        for error in exc.errors()
    )
    return f"Configuration validation failed: {details}"


def parse_run_config(payload: dict[str, Any]) -> RunConfig:
    """Validate a decoded run configuration.

    Args:
        payload (dict[str, Any]): Decoded JSON document.

    Raises:
        ValueError: if the payload violates the schema or an invariant.

    Returns:
        RunConfig: The validated run configuration.
    """
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as exc:
        raise ValueError(_describe_validation_error(exc)) from exc


def load_run_config(config_path: Path) -> RunConfig:
    """Read and validate a run configuration document.

    Args:
        config_path (Path): Location of the JSON document.

    Returns:
        RunConfig: The validated run configuration.
    """
    return parse_run_config(_load_raw_config(config_path))


def dump_run_config(config: RunConfig) -> bytes:
    """Serialise a run configuration to indented JSON bytes.

    Args:
        config (RunConfig): Configuration to serialise.

    Returns:
        bytes: JSON document that parses back to an equal configuration.
    """
    payload = config.model_dump(mode="json", by_alias=True)
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)


def _build_settings() -> ShockpatchSettings:
    """Build the settings from the environment.

    Raises:
        ValueError: if the environment holds invalid settings.

    Returns:
        ShockpatchSettings: The validated settings instance.
    """
    try:
        return ShockpatchSettings()
    except ValidationError as exc:  # pragma: no cover - environment errors
        raise ValueError("Settings validation failed") from exc


@lru_cache(maxsize=1)
def get_settings() -> ShockpatchSettings:
    """Return the cached settings instance.

    Returns:
        ShockpatchSettings: The validated settings instance.
    """
    return _build_settings()


def reload_settings() -> ShockpatchSettings:
    """Clear the settings cache and reload the environment.

    Returns:
        ShockpatchSettings: The validated settings instance.
    """
    get_settings.cache_clear()
    return get_settings()


configure_logger(
    log_level=get_settings().log_level,
    human_readable=get_settings().human_readable_logs,
)
logger = get_logger("shockpatch")

__all__ = [
    "ShockpatchSettings",
    "dump_run_config",
    "example_config_path",
    "get_settings",
    "load_run_config",
    "parse_run_config",
    "reload_settings",
]
