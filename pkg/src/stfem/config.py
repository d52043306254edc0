#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Configuration for the space-time solver.

Provides validation, loading, and global access to runtime configuration.
"""

import typing as t

from pathlib import Path

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

from .const import (
    DEFAULT_EPS_F,
    DEFAULT_GAMMA_J,
    DEFAULT_T_END,
    MERGE_TOLERANCE,
    NEWTON_MAX_ITERATIONS,
    NEWTON_TOLERANCE,
    PIVOT_TOLERANCE,
    ROOT_TOLERANCE,
    SIGN_TOLERANCE,
)
from .exc import ConfigurationError


class LogConfig(BaseModel):
    """Schema for logging configuration."""

    level: t.Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    """Log level for the standard error stream."""

    format: str | None = None
    """Log format string for log messages.
    If not provided, the default format will be used.
    """

    datefmt: str | None = None
    """Date format string for log timestamps.
    If not provided, the default format will be used.
    """


class GeometryConfig(BaseModel):
    """Schema for tolerances of the geometry handling."""

    sign_tolerance: float = Field(default=SIGN_TOLERANCE, ge=0)
    """Tie tolerance of level set signs, relative to the domain length."""

    newton_tolerance: float = Field(default=NEWTON_TOLERANCE, gt=0)
    """Step tolerance of the displacement root solves."""

    newton_max_iterations: int = Field(default=NEWTON_MAX_ITERATIONS, ge=1)
    """Iteration cap of the displacement root solves."""

    root_tolerance: float = Field(default=ROOT_TOLERANCE, gt=0)
    """Tolerance of the vertex trajectory root refinement."""

    merge_tolerance: float = Field(default=MERGE_TOLERANCE, gt=0)
    """Breakpoint merge distance relative to the slab length."""


class SolverConfig(BaseModel):
    """Schema for linear solver configuration."""

    pivot_tolerance: float = Field(default=PIVOT_TOLERANCE, ge=0)
    """Smallest admissible pivot relative to the matrix infinity norm.
    Zero disables the singularity check.
    """

    assembly_workers: int = Field(default=1, ge=1)
    """Threads assembling the volume form of a slab. One assembles in the
    calling thread.
    """


class DefaultsConfig(BaseModel):
    """Schema for default method parameters."""

    gamma_j: float = Field(default=DEFAULT_GAMMA_J, ge=0)
    """Ghost penalty parameter."""

    eps_f: float = Field(default=DEFAULT_EPS_F, ge=1)
    """Extension factor of the CG strip width."""

    t_end: float = Field(default=DEFAULT_T_END, gt=0)
    """Final time of the moving problems."""


class OutputConfig(BaseModel):
    """Schema for study output configuration."""

    directory: Path = Path("out")
    """Directory receiving the .dat files of the studies."""


class RuntimeConfig(BaseSettings):
    """Schema for runtime configuration.

    Handles validation and loading of runtime config values.
    """

    LOG: LogConfig = Field(
        default_factory=lambda: LogConfig(),  # noqa: PLW0108
    )
    """Logging configuration."""

    GEOMETRY: GeometryConfig = Field(
        default_factory=lambda: GeometryConfig(),  # noqa: PLW0108
    )
    """Geometry tolerances."""

    SOLVER: SolverConfig = Field(
        default_factory=lambda: SolverConfig(),  # noqa: PLW0108
    )
    """Linear solver configuration."""

    DEFAULTS: DefaultsConfig = Field(
        default_factory=lambda: DefaultsConfig(),  # noqa: PLW0108
    )
    """Default method parameters."""

    OUTPUT: OutputConfig = Field(
        default_factory=lambda: OutputConfig(),  # noqa: PLW0108
    )
    """Study output configuration."""

    @t.override
    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # only explicit values and the TOML file; no environment lookup
        toml_file: str | None = init_settings().pop("_toml_file", None)
        if toml_file is None:
            return (init_settings,)

        toml_settings = TomlConfigSettingsSource(cls, toml_file)
        return (init_settings, toml_settings)

    model_config = SettingsConfigDict(
        extra="forbid",
        frozen=True,
        alias_generator=lambda s: s.lower(),
        validate_default=True,
        validate_by_name=True,
    )
    """Base model configuration."""


_current: RuntimeConfig | None = None


def setup_config(path_or_obj: str | Path | RuntimeConfig) -> RuntimeConfig:
    """Initialize and set the global runtime configuration instance.

    Args:
        path_or_obj (str | Path | RuntimeConfig): Path to the TOML config file
            or a RuntimeConfig instance to use.

    Returns:
        RuntimeConfig: The initialized config instance.

    Raises:
        ConfigurationError: If the file is missing or fails validation.
    """
    global _current  # noqa: PLW0603

    if not isinstance(path_or_obj, RuntimeConfig):
        path = Path(path_or_obj)
        if not path.is_file():
            error = f"Configuration file not found: {path}"
            raise ConfigurationError(error)
        try:
            path_or_obj = RuntimeConfig(_toml_file=str(path))  # pyright: ignore[reportCallIssue]
        except ValidationError as exc:
            error = f"Invalid configuration in {path}: {exc}"
            raise ConfigurationError(error) from exc

    _current = path_or_obj
    return path_or_obj


def get_config() -> RuntimeConfig:
    """Get the global runtime configuration.

    Returns:
        RuntimeConfig: The configuration set by `setup_config`, or the
            defaults when none was set up.
    """
    if _current is None:
        return RuntimeConfig()
    return _current


def reset_config() -> None:
    """Forget the global runtime configuration."""
    global _current  # noqa: PLW0603
    _current = None
