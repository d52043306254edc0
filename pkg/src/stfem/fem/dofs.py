#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Global numbering of continuous spatial Lagrange dofs."""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .polynomials import gauss_lobatto_points


if t.TYPE_CHECKING:
    import numpy.typing as npt

    from .mesh import BackgroundMesh, BoolArray, IntArray
    from .polynomials import FloatArray


@dataclass(frozen=True, eq=False)
class SpatialDofTable:
    """Continuous degree-k Lagrange dofs on the full background mesh.

    Vertices come first (dof ``v`` is vertex ``v``), followed by the
    ``k - 1`` interior nodes of each element in element order. The numbering
    does not depend on any active set, so that it is stable across slabs.
    """

    mesh: BackgroundMesh
    degree: int
    element_dofs: IntArray = field(repr=False)
    """Dofs of each element in local node order, shape (n_elements, k + 1)."""

    @property
    def n_dofs(self) -> int:
        """Total number of dofs."""
        return int(self.element_dofs.max()) + 1

    @cached_property
    def coordinates(self) -> FloatArray:
        """Undeformed node coordinate of every dof."""
        xi = gauss_lobatto_points(self.degree)
        coords = np.empty(self.n_dofs)
        elements = np.arange(self.mesh.n_elements)
        coords[self.element_dofs] = self.mesh.from_reference(
            elements[:, None], xi[None, :]
        )
        return coords

    def gather(self, vector: FloatArray) -> FloatArray:
        """Element-wise copies of a global coefficient vector.

        Args:
            vector (FloatArray): Global coefficients, last axis over dofs.

        Returns:
            FloatArray: Coefficients of shape (..., n_elements, k + 1).
        """
        return vector[..., self.element_dofs]

    def average(self, elementwise: FloatArray) -> FloatArray:
        """Continuous coefficients from element-wise ones.

        Shared vertex values are replaced by the mean of their copies.

        Args:
            elementwise (FloatArray): Coefficients (n_elements, k + 1).

        Returns:
            FloatArray: Global coefficient vector.
        """
        sums = np.zeros(self.n_dofs)
        counts = np.zeros(self.n_dofs)
        np.add.at(sums, self.element_dofs, elementwise)
        np.add.at(counts, self.element_dofs, 1.0)
        return sums / counts

    def dofs_on(self, elements: npt.ArrayLike) -> BoolArray:
        """Mask of dofs supported on a set of elements.

        Args:
            elements (ArrayLike): Boolean element mask.

        Returns:
            BoolArray: Boolean dof mask.
        """
        mask = np.zeros(self.n_dofs, dtype=bool)
        mask[self.element_dofs[np.asarray(elements, dtype=bool)].ravel()] = True
        return mask


def build_dof_table(mesh: BackgroundMesh, degree: int) -> SpatialDofTable:
    """Number the degree-k Lagrange dofs of a mesh.

    Args:
        mesh (BackgroundMesh): The background mesh.
        degree (int): Polynomial degree, at least 1.

    Returns:
        SpatialDofTable: The dof table.

    Raises:
        ValueError: If the degree is below 1.
    """
    if degree < 1:
        error = f"Spatial degree must be at least 1, got {degree}."
        raise ValueError(error)

    n_el = mesh.n_elements
    table = np.empty((n_el, degree + 1), dtype=np.intp)
    table[:, 0] = np.arange(n_el)
    table[:, -1] = np.arange(1, n_el + 1)
    interior = mesh.n_vertices + np.arange(n_el * (degree - 1)).reshape(
        n_el, degree - 1
    )
    table[:, 1:-1] = interior
    table.setflags(write=False)
    return SpatialDofTable(mesh=mesh, degree=degree, element_dofs=table)
