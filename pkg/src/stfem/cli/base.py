#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Base of command-line interface."""

from __future__ import annotations

import typing as t

from contextlib import contextmanager
from importlib import import_module
from pathlib import Path
from pkgutil import iter_modules

import click

from pydantic import ValidationError

from stfem.config import RuntimeConfig, setup_config
from stfem.const import DEFAULT_CONFIG_PATH
from stfem.entities.method_config import MethodConfig
from stfem.exc import (
    ConfigurationError,
    ExtensionConstraintError,
    SolverError,
    STFEMError,
)
from stfem.logger import logger, setup_logger
from stfem.messages import E, I


if t.TYPE_CHECKING:
    from collections.abc import Iterator


EXIT_FAILURE = 1
"""Exit code of any other solver error."""

EXIT_CONSTRAINT = 2
"""Exit code of a violated extension constraint."""

EXIT_SOLVER = 3
"""Exit code of a linear solver failure."""


@click.group()
def stfem() -> None:
    """Unfitted space-time finite elements on moving 1D domains."""


config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path, dir_okay=False),
    default=None,
    help=f"Runtime configuration TOML file [default: {DEFAULT_CONFIG_PATH} if present].",
)


def load_runtime(config_path: Path | None) -> RuntimeConfig:
    """Set up configuration and logging for a command.

    Args:
        config_path (Path | None): Explicit configuration file.

    Returns:
        RuntimeConfig: The active configuration.
    """
    path = config_path
    if path is None and Path(DEFAULT_CONFIG_PATH).is_file():
        path = Path(DEFAULT_CONFIG_PATH)
    config = setup_config(path if path is not None else RuntimeConfig())
    setup_logger(config)
    if path is not None:
        logger.info(I.CONFIG_LOADED, {"path": str(path)})
    return config


def build_method_config(**fields: t.Any) -> MethodConfig:  # noqa: ANN401
    """Validate command options into a method configuration.

    Args:
        **fields (Any): Fields of ``MethodConfig``; None values are dropped.

    Returns:
        MethodConfig: The configuration.

    Raises:
        ConfigurationError: If the options are inconsistent.
    """
    try:
        return MethodConfig.model_validate({
            key: value for key, value in fields.items() if value is not None
        })
    except ValidationError as exc:
        error = f"Invalid method options: {exc}"
        raise ConfigurationError(error) from exc


@contextmanager
def exit_on_error(ctx: click.Context) -> Iterator[None]:
    """Map solver errors to exit codes.

    Args:
        ctx (click.Context): Context of the running command.

    Yields:
        None: Control to the block.
    """
    try:
        yield
    except STFEMError as exc:
        logger.error(E.RUN_ABORTED, {"error": str(exc)})
        click.echo(f"Error: {exc}", err=True)
        if isinstance(exc, ExtensionConstraintError):
            ctx.exit(EXIT_CONSTRAINT)
        if isinstance(exc, SolverError):
            ctx.exit(EXIT_SOLVER)
        ctx.exit(EXIT_FAILURE)


def register_cli_commands(group: click.Group) -> None:
    """Register all CLI commands to the command group.

    In each module, only objects with the same name as the module itself
    are treated as subcommands.

    Args:
        group (click.Group): The root command group.
    """
    for _, name, _ in iter_modules([str(Path(__file__).parent)]):
        module = import_module(f"{__package__}.{name}")
        cmd = getattr(module, name, None)
        if isinstance(cmd, click.Command):
            group.add_command(cmd)


def main(argv: list[str] | None = None) -> t.Any:  # noqa: ANN401
    """Entry point of the ``stfem`` command.

    Args:
        argv (list[str] | None): Arguments; the process arguments if None.

    Returns:
        Any: Result of the command in standalone mode.
    """
    register_cli_commands(stfem)
    return stfem.main(args=argv)
