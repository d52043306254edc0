#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Plot-ready .dat files and order tables of study results."""

from __future__ import annotations

import json
import typing as t

from pathlib import Path

import numpy as np

from stfem.const import DAT_COLUMNS
from stfem.logger import logger
from stfem.messages import I

from .studies import observed_orders


if t.TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from stfem.entities.error_report import StudyRow


def write_dat(
    rows: Sequence[StudyRow], path: str | Path, metadata: Mapping[str, t.Any]
) -> Path:
    """Write study rows as whitespace separated columns.

    The single header line holds the metadata and the column names as JSON.

    Args:
        rows (Sequence[StudyRow]): Rows in level order.
        path (str | Path): Target file; parent directories are created.
        metadata (Mapping[str, Any]): Configuration of the series.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps({**metadata, "columns": list(DAT_COLUMNS)}, default=str)
    data = np.array([row.columns() for row in rows], dtype=np.float64).reshape(
        -1, len(DAT_COLUMNS)
    )
    np.savetxt(path, data, fmt="%.10e", header=header, comments="# ")
    logger.info(I.DAT_WRITTEN, {"rows": len(rows), "path": str(path)})
    return path


def read_dat(path: str | Path) -> tuple[dict[str, t.Any], np.ndarray]:
    """Read a file written by ``write_dat``.

    Args:
        path (str | Path): The file.

    Returns:
        tuple[dict[str, Any], ndarray]: Metadata and the data columns.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as file:
        header = file.readline().removeprefix("#").strip()
    data = np.loadtxt(path, ndmin=2)
    return json.loads(header), data


def order_table(rows: Sequence[StudyRow]) -> str:
    """Text table of errors and observed orders of a series.

    Args:
        rows (Sequence[StudyRow]): Rows in level order.

    Returns:
        str: One line per row.
    """
    final = observed_orders([row.report.l2_final for row in rows])
    space_time = observed_orders([row.report.l2l2 for row in rows])
    lines = [f"{'i':>6} {'l2_final':>12} {'eoc':>6} {'l2l2':>12} {'eoc':>6} {'nze_max':>8}"]
    for index, row in enumerate(rows):
        eoc_final = f"{final[index - 1]:6.2f}" if index else " " * 6
        eoc_st = f"{space_time[index - 1]:6.2f}" if index else " " * 6
        lines.append(
            f"{row.i:>6g} {row.report.l2_final:12.4e} {eoc_final} "
            f"{row.report.l2l2:12.4e} {eoc_st} {row.report.nze_max:>8d}"
        )
    return "\n".join(lines)
