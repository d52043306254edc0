#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Problem descriptions and their per-slab tensor-product level sets.

On slab n the discrete level set is

    phi_h(x, t) = sum_i l_i(t) phi_h^i(x),

with l_i the Lagrange basis on the Gauss-Lobatto points of order q_t in time
and phi_h^i continuous degree-q_s Lagrange functions in space. phi^lin
replaces every phi_h^i by its vertex interpolant.
"""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from numpy.polynomial import Legendre, Polynomial

from stfem.exc import GeometryError

from .polynomials import lagrange_basis


if t.TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

    from .mesh import BackgroundMesh, TimeSlabbing
    from .polynomials import FloatArray, LagrangeBasis


type ScalarField = Callable[[FloatArray, FloatArray], FloatArray]
"""Vectorised function of (x, t)."""

type InitialField = Callable[[FloatArray], FloatArray]
"""Vectorised function of x."""


@dataclass(frozen=True, eq=False)
class ProblemDefinition:
    """Analytic convection-diffusion problem on a moving domain.

    The physical domain at time t is {x : phi(x, t) < 0} inside the
    background domain.
    """

    name: str
    """Short identifier used in run labels and output files."""

    phi: ScalarField
    """Level set function."""

    w: ScalarField
    """Velocity field."""

    f: ScalarField
    """Source term."""

    u0: InitialField
    """Initial value, defined on the whole background domain."""

    domain: tuple[float, float]
    """Background domain."""

    t_end: float
    """Final time."""

    w_inf: float
    """Bound of |w| over the space-time domain."""

    u_exact: ScalarField | None = None
    """Exact solution, for manufactured problems."""

    u0_dt: InitialField | None = None
    """Time derivative of the solution at t = 0, needed by GCC."""

    boundary: Callable[[float], FloatArray] | None = None
    """Exact boundary points at a time, for the geometry distance."""

    neumann_flux: ScalarField | None = None
    """Exact du/dx, applied where the domain reaches the background boundary."""


@dataclass(frozen=True, eq=False)
class LevelSetSlab:
    """Tensor-product discrete level set on one slab."""

    slab_index: int
    mesh: BackgroundMesh
    t_lo: float
    t_hi: float
    q_s: int
    q_t: int
    coeff_funcs: FloatArray = field(repr=False)
    """Nodal values of phi_h^i per element, shape (q_t + 1, n_elements, q_s + 1)."""

    lin_coeff_funcs: FloatArray = field(repr=False)
    """Vertex values of phi_h^i, shape (q_t + 1, n_vertices)."""

    @property
    def dt(self) -> float:
        """Slab length."""
        return self.t_hi - self.t_lo

    @property
    def temporal_basis(self) -> LagrangeBasis:
        """Temporal Lagrange basis on the reference interval."""
        return lagrange_basis(self.q_t)

    @property
    def spatial_basis(self) -> LagrangeBasis:
        """Spatial Lagrange basis on the reference element."""
        return lagrange_basis(self.q_s)

    def time_to_reference(self, t: npt.ArrayLike) -> FloatArray:
        """Reference time in [-1, 1].

        Args:
            t (ArrayLike): Times in the slab.

        Returns:
            FloatArray: Reference times.

        Raises:
            GeometryError: If a time lies outside the closed slab.
        """
        t = np.asarray(t, dtype=np.float64)
        tol = 1e-12 * self.dt
        if np.any(t < self.t_lo - tol) or np.any(t > self.t_hi + tol):
            error = f"Times outside slab [{self.t_lo}, {self.t_hi}]."
            raise GeometryError(error)
        return 2.0 * (t - self.t_lo) / self.dt - 1.0

    def temporal_values(self, t: npt.ArrayLike) -> FloatArray:
        """Values of l_i at given times, trailing axis over i."""
        return self.temporal_basis.values(self.time_to_reference(t))

    def temporal_derivatives(self, t: npt.ArrayLike) -> FloatArray:
        """Time derivatives of l_i at given times, trailing axis over i."""
        ref = self.time_to_reference(t)
        return self.temporal_basis.derivatives(ref) * (2.0 / self.dt)

    def vertex_values(self, t: float) -> FloatArray:
        """Values of phi^lin (equal to phi_h) at all vertices at one time."""
        return self.temporal_values(t) @ self.lin_coeff_funcs

    def vertex_trajectory(self, vertex: int) -> Polynomial:
        """Level set at a vertex as a polynomial of the reference time.

        Args:
            vertex (int): Vertex index.

        Returns:
            Polynomial: phi^lin(v, t(tau)) in the power basis of tau in [-1, 1].
        """
        leg = self.temporal_basis.legendre_coefficients(
            self.lin_coeff_funcs[:, vertex]
        )
        return Legendre(leg).convert(kind=Polynomial)

    def reference_to_time(self, tau: npt.ArrayLike) -> FloatArray:
        """Physical time of reference times."""
        return self.t_lo + 0.5 * self.dt * (np.asarray(tau) + 1.0)


def interpolate_levelset(
    prob: ProblemDefinition,
    mesh: BackgroundMesh,
    slabs: TimeSlabbing,
    n: int,
    q_s: int,
    q_t: int,
) -> LevelSetSlab:
    """Interpolate the problem level set on one slab.

    Args:
        prob (ProblemDefinition): The problem.
        mesh (BackgroundMesh): Background mesh.
        slabs (TimeSlabbing): Time slabbing.
        n (int): Slab index, 1-based.
        q_s (int): Spatial geometry order, at least 1.
        q_t (int): Temporal geometry order, at least 0.

    Returns:
        LevelSetSlab: The discrete level set.

    Raises:
        GeometryError: If an order is out of range.
    """
    if q_s < 1 or q_t < 0:
        error = f"Geometry orders must satisfy q_s >= 1, q_t >= 0, got ({q_s}, {q_t})."
        raise GeometryError(error)

    t_lo, t_hi = slabs.slab(n)
    s_nodes = lagrange_basis(q_s).nodes
    tau = lagrange_basis(q_t).nodes
    sigma = 0.5 * (tau + 1.0)
    # end nodes coincide bitwise with the slab end points
    t_nodes = t_lo * (1.0 - sigma) + t_hi * sigma

    x_nodes = mesh.from_reference(np.arange(mesh.n_elements)[:, None], s_nodes[None, :])
    xx = np.broadcast_to(x_nodes, (q_t + 1, *x_nodes.shape))
    tt = np.broadcast_to(t_nodes[:, None, None], xx.shape)
    values = np.asarray(prob.phi(xx, tt), dtype=np.float64)

    lin = np.concatenate((values[:, :, 0], values[:, -1:, -1]), axis=1)
    values.setflags(write=False)
    lin.setflags(write=False)
    return LevelSetSlab(
        slab_index=n,
        mesh=mesh,
        t_lo=t_lo,
        t_hi=t_hi,
        q_s=q_s,
        q_t=q_t,
        coeff_funcs=values,
        lin_coeff_funcs=lin,
    )


def eval_on_element(
    ls: LevelSetSlab, element: npt.ArrayLike, xi: npt.ArrayLike, t: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Evaluate phi_h through the polynomial of given elements.

    Reference points outside [-1, 1] evaluate the canonical polynomial
    extension.

    Args:
        ls (LevelSetSlab): The level set.
        element (ArrayLike): Element per point.
        xi (ArrayLike): Reference coordinate per point.
        t (ArrayLike): Time per point.

    Returns:
        tuple[FloatArray, FloatArray]: Values and spatial derivatives.
    """
    element, xi, t = np.broadcast_arrays(
        np.asarray(element), np.asarray(xi, dtype=np.float64), np.asarray(t)
    )
    shape_vals = ls.spatial_basis.values(xi)
    shape_ders = ls.spatial_basis.derivatives(xi) * (2.0 / ls.mesh.h)
    temporal = ls.temporal_values(t)
    nodal = np.moveaxis(ls.coeff_funcs[:, element, :], 0, -2)
    spatial = np.einsum("...ia,...a->...i", nodal, shape_vals)
    spatial_dx = np.einsum("...ia,...a->...i", nodal, shape_ders)
    value = np.einsum("...i,...i->...", temporal, spatial)
    deriv = np.einsum("...i,...i->...", temporal, spatial_dx)
    return value, deriv


def eval_phih(ls: LevelSetSlab, x: npt.ArrayLike, t: npt.ArrayLike) -> FloatArray:
    """Evaluate the discrete level set phi_h.

    Args:
        ls (LevelSetSlab): The level set.
        x (ArrayLike): Points in the mesh domain.
        t (ArrayLike): Times in the slab.

    Returns:
        FloatArray: phi_h(x, t).
    """
    element = ls.mesh.locate(x)
    value, _ = eval_on_element(ls, element, ls.mesh.to_reference(element, x), t)
    return value


def eval_phih_dx(ls: LevelSetSlab, x: npt.ArrayLike, t: npt.ArrayLike) -> FloatArray:
    """Evaluate the spatial derivative of phi_h.

    Args:
        ls (LevelSetSlab): The level set.
        x (ArrayLike): Points in the mesh domain.
        t (ArrayLike): Times in the slab.

    Returns:
        FloatArray: d/dx phi_h(x, t).
    """
    element = ls.mesh.locate(x)
    _, deriv = eval_on_element(ls, element, ls.mesh.to_reference(element, x), t)
    return deriv


def eval_philin(ls: LevelSetSlab, x: npt.ArrayLike, t: npt.ArrayLike) -> FloatArray:
    """Evaluate the piecewise linear level set phi^lin.

    Args:
        ls (LevelSetSlab): The level set.
        x (ArrayLike): Points in the mesh domain.
        t (ArrayLike): Times in the slab.

    Returns:
        FloatArray: phi^lin(x, t).
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t))
    element = ls.mesh.locate(x)
    s = 0.5 * (ls.mesh.to_reference(element, x) + 1.0)
    temporal = ls.temporal_values(t)
    lin = np.moveaxis(ls.lin_coeff_funcs, 0, -1)
    left = np.sum(temporal * lin[element], axis=-1)
    right = np.sum(temporal * lin[element + 1], axis=-1)
    return left * (1.0 - s) + right * s


def philin_vertex_values(
    ls: LevelSetSlab, element: int, t: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """phi^lin at the two vertices of an element.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        t (ArrayLike): Times in the slab.

    Returns:
        tuple[FloatArray, FloatArray]: Left and right vertex values.
    """
    temporal = ls.temporal_values(t)
    return (
        temporal @ ls.lin_coeff_funcs[:, element],
        temporal @ ls.lin_coeff_funcs[:, element + 1],
    )
