#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Constant values for the space-time solver."""

# ruff: noqa: N801

from enum import StrEnum
from typing import Final


DEFAULT_CONFIG_PATH: Final = "configs/stfem.config.toml"
"""Default path to the runtime configuration TOML file."""

LOGGER_NAME: Final = "stfem"
"""Name of the package logger."""

DEFAULT_LOG_FORMAT: Final = (
    "[%(asctime)s.%(msecs)03dZ] %(levelname)-8s %(message)s (%(run)s)"
)
"""Default log format string."""

DEFAULT_LOG_DATEFMT: Final = "%Y-%m-%dT%H:%M:%S"
"""Default date format string for log timestamps."""


SIGN_TOLERANCE: Final = 1e-14
"""Relative tie tolerance for level set signs, scaled by the domain length."""

NEWTON_TOLERANCE: Final = 1e-14
"""Step tolerance of the geometry root solves, relative to the mesh size."""

NEWTON_MAX_ITERATIONS: Final = 50
"""Iteration cap of the geometry root solves."""

INVERSION_TOLERANCE: Final = 1e-13
"""Tolerance of the deformation inversion, relative to the mesh size."""

ROOT_TOLERANCE: Final = 1e-13
"""Tolerance of polynomial root refinement on the reference interval."""

CHEBYSHEV_FACTOR: Final = 8
"""Number of Chebyshev bracketing samples per polynomial degree."""

MERGE_TOLERANCE: Final = 1e-12
"""Relative distance (in units of the slab length) below which breakpoints merge."""

PIVOT_TOLERANCE: Final = 1e-13
"""Smallest admissible LU pivot, relative to the infinity norm of the matrix."""

DEFAULT_GAMMA_J: Final = 0.05
"""Default ghost penalty parameter."""

DEFAULT_EPS_F: Final = 1.1
"""Default extension factor of the CG strip."""

DEFAULT_T_END: Final = 0.5
"""Final time of the moving interval and polynomial stress problems."""

DAT_COLUMNS: Final = ("i", "l2_final", "l2l2", "nze_max", "wall", "geom_dist")
"""Column order of the study output files."""


class METHODS(StrEnum):
    """Time discretisations of the slab problems."""

    DG = "dg"
    """Discontinuous Galerkin in time with upwind coupling."""

    CG = "cg"
    """Continuous Galerkin in time with the strip extension E+."""

    CGBOX = "cgbox"
    """Continuous Galerkin with a tensor-product ghost penalty on E+."""

    GCC = "gcc"
    """Galerkin-collocation with cubic Hermite time basis, (3, 1, 1)."""


class TIME_RULES(StrEnum):
    """Space-time quadrature strategies."""

    PRESERVE = "preserve"
    """Time subdivision at the topology changes of the cut."""

    INSENSITIVE = "insensitive"
    """Plain Gauss rule in time that ignores topology changes."""


class REFINEMENTS(StrEnum):
    """Refinement directions of a convergence study."""

    BOTH = "both"
    SPACE = "space"
    TIME = "time"


class TEMPORAL_KINDS(StrEnum):
    """Temporal basis families."""

    LAGRANGE = "gauss_lobatto_lagrange"
    HERMITE = "cubic_hermite"


class SUBDOMAINS(StrEnum):
    """Parts of an element selected by a spatial cut rule."""

    INSIDE = "inside"
    OUTSIDE = "outside"
    FULL = "full"


class GHOST_PENALTIES(StrEnum):
    """Integration modes of the ghost penalty."""

    TIME_INTEGRATED = "time_integrated"
    """Integrated over the slab with the scaled parameter (1 + dt/h) gamma_J."""

    SPATIAL = "spatial"
    """Evaluated at a single time with the plain parameter gamma_J."""
