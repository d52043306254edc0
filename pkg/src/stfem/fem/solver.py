#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Dense LU solve of slab systems."""

from __future__ import annotations

import typing as t
import warnings

import numpy as np

from scipy import linalg

from stfem.const import PIVOT_TOLERANCE
from stfem.exc import SingularSystemError, SolverError
from stfem.logger import logger
from stfem.messages import E


if t.TYPE_CHECKING:
    from .assembly import SlabSystem
    from .polynomials import FloatArray


def smallest_pivot(lu: FloatArray) -> float:
    """Magnitude of the smallest pivot of an LU factorisation.

    Args:
        lu (FloatArray): Combined LU factors as returned by ``lu_factor``.

    Returns:
        float: The smallest absolute diagonal entry.
    """
    return float(np.min(np.abs(np.diag(lu))))


def solve_slab(
    system: SlabSystem,
    *,
    pivot_tolerance: float = PIVOT_TOLERANCE,
    gamma_j: float | None = None,
    slab_index: int | None = None,
) -> FloatArray:
    """Solve a slab system with partially pivoted LU.

    Args:
        system (SlabSystem): The system.
        pivot_tolerance (float): Smallest admissible pivot relative to the
            infinity norm of the matrix; 0 disables the check.
        gamma_j (float | None): Ghost penalty parameter, named in the error.
        slab_index (int | None): Slab index, named in the error.

    Returns:
        FloatArray: Values of the unknowns.

    Raises:
        SingularSystemError: If a pivot falls below the threshold.
        SolverError: If the matrix has non-finite entries.
    """
    checked = pivot_tolerance > 0.0
    with warnings.catch_warnings():
        if not checked:
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            warnings.simplefilter("ignore", RuntimeWarning)
        try:
            lu, piv = linalg.lu_factor(system.matrix, check_finite=checked)
        except ValueError as exc:
            error = f"Cannot factorise the system of slab {slab_index}: {exc}"
            raise SolverError(error) from exc

        norm = float(np.linalg.norm(system.matrix, ord=np.inf))
        if checked and smallest_pivot(lu) < pivot_tolerance * norm:
            logger.error(E.SINGULAR_SYSTEM, {"n": slab_index, "gamma_j": gamma_j})
            error = (
                f"System of slab {slab_index} is numerically singular "
                f"(pivot {smallest_pivot(lu):.3e}, norm {norm:.3e}); "
                f"gamma_J={gamma_j} may be too small."
            )
            raise SingularSystemError(error)

        return linalg.lu_solve((lu, piv), system.rhs, check_finite=checked)
