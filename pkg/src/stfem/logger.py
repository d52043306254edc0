#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Logging setup for the space-time solver."""

from __future__ import annotations

import logging
import time
import typing as t

from contextlib import contextmanager
from contextvars import ContextVar
from logging import Formatter, LogRecord, StreamHandler

from stfem.const import DEFAULT_LOG_DATEFMT, DEFAULT_LOG_FORMAT, LOGGER_NAME


if t.TYPE_CHECKING:
    from collections.abc import Iterator

    from stfem.config import RuntimeConfig


logger = logging.getLogger(LOGGER_NAME)
"""The package logger."""

_run_label: ContextVar[str] = ContextVar("run_label", default="-")


def setup_logger(config: RuntimeConfig) -> None:
    """Setup logging for the solver.

    Set logging level, format, and handlers based on the configuration.

    Args:
        config (RuntimeConfig): The runtime configuration instance.
    """
    logger.setLevel(config.LOG.level)

    handler = next(
        (hd for hd in logger.handlers if isinstance(hd, StreamHandler)),
        None,
    )
    if handler is None:
        handler = StreamHandler()
        logger.addHandler(handler)

    handler.setLevel(config.LOG.level)

    formatter = _create_formatter(config)
    handler.setFormatter(formatter)
    if _run_context_filter not in handler.filters:
        handler.addFilter(_run_context_filter)


def _create_formatter(config: RuntimeConfig) -> Formatter:
    format_str = config.LOG.format or DEFAULT_LOG_FORMAT
    datefmt = config.LOG.datefmt or DEFAULT_LOG_DATEFMT
    formatter = Formatter(fmt=format_str, datefmt=datefmt)
    # use UTC time for log timestamps
    formatter.converter = time.gmtime

    return formatter


def _run_context_filter(record: LogRecord) -> t.Literal[True]:
    record.run = _run_label.get()
    return True


@contextmanager
def run_context(label: str) -> Iterator[None]:
    """Label all log records emitted inside the block with a run name.

    Args:
        label (str): Short description of the current run.

    Yields:
        None: Control to the block.
    """
    token = _run_label.set(label)
    try:
        yield
    finally:
        _run_label.reset(token)


def current_run() -> str:
    """Get the label of the current run.

    Returns:
        str: The label, or "-" outside of any run.
    """
    return _run_label.get()
