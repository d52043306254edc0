#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Custom exceptions for the space-time solver."""


class STFEMError(Exception):
    """Base exception for the space-time solver."""


class ConfigurationError(STFEMError):
    """Exception for configuration errors."""


class MeshError(STFEMError):
    """Exception for mesh and time slab errors.

    Errors caused by invalid mesh parameters or points outside the mesh.
    """


class GeometryError(STFEMError):
    """Exception for level set geometry errors.

    Errors caused by evaluations outside a slab or inconsistent element
    classification.
    """


class DeformationError(GeometryError):
    """Exception for isoparametric mapping errors.

    Errors caused by failed root searches, too large displacements,
    non-positive Jacobians or failed inversions.
    """


class QuadratureError(STFEMError):
    """Exception for invalid quadrature rules."""


class SpaceError(STFEMError):
    """Exception for finite element space errors.

    Errors caused by unsupported temporal bases, empty trial spaces or
    non-square trial and test layouts.
    """


class ExtensionConstraintError(STFEMError):
    """Exception for a violated extension constraint.

    The active region of the next slab is not covered by the extension
    region of the current slab.
    """


class SolverError(STFEMError):
    """Exception for linear solver failures."""


class SingularSystemError(SolverError):
    """Exception for numerically singular slab systems."""
