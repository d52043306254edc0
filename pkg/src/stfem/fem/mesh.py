#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Uniform one-dimensional background mesh and uniform time slabs."""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from stfem.exc import MeshError


if t.TYPE_CHECKING:
    import numpy.typing as npt

    from .polynomials import FloatArray


type IntArray = npt.NDArray[np.intp]
"""Array of indices."""

type BoolArray = npt.NDArray[np.bool_]
"""Mask over elements, dofs or points."""


@dataclass(frozen=True, eq=False)
class BackgroundMesh:
    """Uniform partition of [domain_lo, domain_hi] into intervals."""

    domain_lo: float
    """Left end of the background domain."""

    domain_hi: float
    """Right end of the background domain."""

    n_elements: int
    """Number of elements."""

    vertices: FloatArray = field(repr=False)
    """Increasing vertex coordinates, ``n_elements + 1`` of them."""

    h: float
    """Uniform element length."""

    @property
    def n_vertices(self) -> int:
        """Number of vertices."""
        return self.n_elements + 1

    @property
    def elements(self) -> IntArray:
        """Vertex index pairs (left, right) of all elements."""
        left = np.arange(self.n_elements)
        return np.stack((left, left + 1), axis=1)

    @property
    def interior_facets(self) -> IntArray:
        """Vertex indices shared by two elements."""
        return np.arange(1, self.n_elements)

    @property
    def length(self) -> float:
        """Length of the background domain."""
        return self.domain_hi - self.domain_lo

    def facet_patch(self, facet: int) -> tuple[int, int]:
        """Elements sharing an interior facet.

        Args:
            facet (int): Interior vertex index.

        Returns:
            tuple[int, int]: Left and right element.

        Raises:
            MeshError: If the vertex is on the boundary or out of range.
        """
        if not 0 < facet < self.n_elements:
            error = f"Vertex {facet} is not an interior facet."
            raise MeshError(error)
        return facet - 1, facet

    def locate(self, x: npt.ArrayLike) -> IntArray:
        """Elements containing the given points.

        Points on an interior vertex are assigned to the right element,
        except the right domain end which belongs to the last element.

        Args:
            x (ArrayLike): Coordinates inside the domain.

        Returns:
            IntArray: Element indices with the shape of ``x``.

        Raises:
            MeshError: If a point lies outside the domain.
        """
        x = np.asarray(x, dtype=np.float64)
        tol = 1e-12 * self.length
        if np.any(x < self.domain_lo - tol) or np.any(x > self.domain_hi + tol):
            error = (
                f"Points outside the mesh domain [{self.domain_lo}, "
                f"{self.domain_hi}]."
            )
            raise MeshError(error)

        elem = np.floor((x - self.domain_lo) / self.h).astype(np.intp)
        elem = np.clip(elem, 0, self.n_elements - 1)
        # floor of the scaled coordinate may be off by one at vertices
        elem = np.where(x < self.vertices[elem], np.maximum(elem - 1, 0), elem)
        return np.where(
            x >= self.vertices[elem + 1],
            np.minimum(elem + 1, self.n_elements - 1),
            elem,
        )

    def to_reference(self, element: npt.ArrayLike, x: npt.ArrayLike) -> FloatArray:
        """Reference coordinates in [-1, 1] of points on elements.

        Points outside the element give reference coordinates outside
        [-1, 1], which is what polynomial extensions evaluate.

        Args:
            element (ArrayLike): Element indices.
            x (ArrayLike): Physical coordinates.

        Returns:
            FloatArray: Reference coordinates.
        """
        left = self.vertices[np.asarray(element)]
        return 2.0 * (np.asarray(x, dtype=np.float64) - left) / self.h - 1.0

    def from_reference(
        self, element: npt.ArrayLike, xi: npt.ArrayLike
    ) -> FloatArray:
        """Physical coordinates of reference points.

        Reference end points map exactly onto the element vertices.

        Args:
            element (ArrayLike): Element indices.
            xi (ArrayLike): Reference coordinates.

        Returns:
            FloatArray: Physical coordinates.
        """
        element = np.asarray(element)
        s = 0.5 * (np.asarray(xi, dtype=np.float64) + 1.0)
        return self.vertices[element] * (1.0 - s) + self.vertices[element + 1] * s


def build_mesh(lo: float, hi: float, n: int) -> BackgroundMesh:
    """Build a uniform mesh.

    Args:
        lo (float): Left end of the domain.
        hi (float): Right end of the domain.
        n (int): Number of elements.

    Returns:
        BackgroundMesh: The mesh.

    Raises:
        MeshError: If ``n < 1`` or ``hi <= lo``.
    """
    if n < 1:
        error = f"Element count must be positive, got {n}."
        raise MeshError(error)
    if not hi > lo:
        error = f"Domain end {hi} must exceed domain start {lo}."
        raise MeshError(error)

    vertices = lo + (hi - lo) * np.arange(n + 1) / n
    vertices[-1] = hi
    vertices.setflags(write=False)
    return BackgroundMesh(
        domain_lo=lo, domain_hi=hi, n_elements=n, vertices=vertices, h=(hi - lo) / n
    )


@dataclass(frozen=True, eq=False)
class TimeSlabbing:
    """Uniform partition of (0, T] into slabs (t_{n-1}, t_n]."""

    t_end: float
    """Final time T."""

    n_slabs: int
    """Number of slabs N."""

    dt: float
    """Slab length T / N."""

    @property
    def times(self) -> FloatArray:
        """Slab end points t_0, ..., t_N."""
        times = self.t_end * np.arange(self.n_slabs + 1) / self.n_slabs
        times[-1] = self.t_end
        return times

    def slab(self, n: int) -> tuple[float, float]:
        """End points of a slab.

        Args:
            n (int): Slab index, 1-based.

        Returns:
            tuple[float, float]: (t_{n-1}, t_n).

        Raises:
            MeshError: If the index is out of range.
        """
        if not 1 <= n <= self.n_slabs:
            error = f"Slab index {n} outside 1..{self.n_slabs}."
            raise MeshError(error)
        times = self.times
        return float(times[n - 1]), float(times[n])


def build_slabs(t_end: float, n_slabs: int) -> TimeSlabbing:
    """Build a uniform time slabbing.

    Args:
        t_end (float): Final time T.
        n_slabs (int): Number of slabs N.

    Returns:
        TimeSlabbing: The slabbing.

    Raises:
        MeshError: If one of the inputs is not positive.
    """
    if not t_end > 0 or n_slabs < 1:
        error = f"Final time and slab count must be positive, got {t_end}, {n_slabs}."
        raise MeshError(error)
    return TimeSlabbing(t_end=t_end, n_slabs=n_slabs, dt=t_end / n_slabs)
