#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Isoparametric space-time mapping of a slab.

The mapping has the tensor structure of the level set,

    Theta(x, t) = x + sum_i l_i(t) d_i(x),

where every displacement d_i is a continuous degree-q_s function that
vanishes outside the cut elements of the slab. In one space dimension the
displacement at vertices is zero, so no blending step is needed.
"""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from scipy.optimize import brentq

from stfem.const import INVERSION_TOLERANCE, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE
from stfem.exc import DeformationError

from .polynomials import lagrange_basis


if t.TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

    from .dofs import SpatialDofTable
    from .levelset import LevelSetSlab
    from .mesh import BackgroundMesh, BoolArray, IntArray
    from .polynomials import FloatArray
    from .regions import ActiveRegions


@dataclass(frozen=True, eq=False)
class SlabDeformation:
    """Discrete deformation Theta_h^n of one slab."""

    levelset: LevelSetSlab
    """Level set the deformation was built from; supplies the time basis."""

    coeff_maps: FloatArray = field(repr=False)
    """Displacement nodal values, shape (q_t + 1, n_elements, q_s + 1)."""

    active: BoolArray = field(repr=False)
    """Elements carrying a displacement."""

    @property
    def slab_index(self) -> int:
        """Slab index, 1-based."""
        return self.levelset.slab_index

    @property
    def mesh(self) -> BackgroundMesh:
        """Background mesh."""
        return self.levelset.mesh

    @property
    def t_lo(self) -> float:
        """Slab start time."""
        return self.levelset.t_lo

    @property
    def t_hi(self) -> float:
        """Slab end time."""
        return self.levelset.t_hi

    @property
    def q_s(self) -> int:
        """Spatial order of the displacements."""
        return self.levelset.q_s


def build_coefficient_map(
    mesh: BackgroundMesh,
    phi_i: FloatArray,
    phi_i_lin: FloatArray,
    active: BoolArray,
    *,
    tol: float = NEWTON_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
) -> FloatArray:
    """Displacement matching a level set function to its vertex interpolant.

    At every interior node x_j of an active element the displacement d_j
    solves P(x_j + d_j) = phi_i_lin(x_j), where P is the polynomial of
    ``phi_i`` on that element, extended beyond the element if needed.

    Args:
        mesh (BackgroundMesh): Background mesh.
        phi_i (FloatArray): Nodal values per element, (n_elements, q_s + 1).
        phi_i_lin (FloatArray): Vertex values of the interpolant.
        active (BoolArray): Elements to deform.
        tol (float): Newton step tolerance relative to h.
        max_iter (int): Newton iteration cap.

    Returns:
        FloatArray: Displacement nodal values per element.

    Raises:
        DeformationError: If no root is found or the displacement exceeds h.
    """
    q_s = phi_i.shape[1] - 1
    basis = lagrange_basis(q_s)
    disp = np.zeros_like(phi_i, dtype=np.float64)
    if q_s < 2:  # noqa: PLR2004
        return disp

    for element in np.nonzero(active)[0]:
        for j in range(1, q_s):
            s = 0.5 * (basis.nodes[j] + 1.0)
            target = phi_i_lin[element] * (1.0 - s) + phi_i_lin[element + 1] * s
            x_j = float(mesh.from_reference(element, basis.nodes[j]))
            # the Lagrange basis sums to one, so shifting nodal values shifts P
            residual, slope = _element_polynomial(
                mesh, int(element), phi_i[element] - target
            )
            y = _safeguarded_root(
                residual,
                slope,
                x_j,
                mesh.h,
                tol=tol * mesh.h,
                max_iter=max_iter,
            )
            if y is None:
                error = (
                    f"No displacement root on element {element} at node {j} "
                    f"(x={x_j:.6g})."
                )
                raise DeformationError(error)
            d = y - x_j
            if abs(d) > mesh.h:
                error = (
                    f"Displacement {d:.3e} on element {element} at node {j} "
                    f"exceeds the mesh size {mesh.h:.3e}."
                )
                raise DeformationError(error)
            disp[element, j] = d
    return disp


def _element_polynomial(
    mesh: BackgroundMesh, element: int, nodal: FloatArray
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Polynomial of an element and its derivative as functions of x."""
    basis = lagrange_basis(len(nodal) - 1)

    def value(y: float) -> float:
        return float(basis.values(mesh.to_reference(element, y)) @ nodal)

    def slope(y: float) -> float:
        xi = mesh.to_reference(element, y)
        return float(basis.derivatives(xi) @ nodal) * 2.0 / mesh.h

    return value, slope


def _safeguarded_root(
    func: Callable[[float], float],
    deriv: Callable[[float], float],
    x0: float,
    radius: float,
    *,
    tol: float,
    max_iter: int,
) -> float | None:
    lo, hi = x0 - radius, x0 + radius
    y = x0
    for _ in range(max_iter):
        value = func(y)
        if value == 0.0:
            return y
        slope = deriv(y)
        if slope == 0.0 or not np.isfinite(slope):
            break
        step = value / slope
        y -= step
        if not lo <= y <= hi:
            break
        if abs(step) <= tol:
            return y

    # bisection fallback on the bracketing interval
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        return None
    return float(brentq(func, lo, hi, xtol=tol, maxiter=max(max_iter, 100)))


def build_slab_deformation(
    ls: LevelSetSlab,
    regions: ActiveRegions,
    *,
    tol: float = NEWTON_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
) -> SlabDeformation:
    """Build the deformation of a slab from all temporal coefficients.

    All coefficient maps share the slab-wide set of cut elements.

    Args:
        ls (LevelSetSlab): The level set.
        regions (ActiveRegions): Regions of the slab.
        tol (float): Newton step tolerance relative to h.
        max_iter (int): Newton iteration cap.

    Returns:
        SlabDeformation: The deformation.
    """
    active = np.asarray(regions.elems_cut, dtype=bool)
    maps = np.stack([
        build_coefficient_map(
            ls.mesh,
            ls.coeff_funcs[i],
            ls.lin_coeff_funcs[i],
            active,
            tol=tol,
            max_iter=max_iter,
        )
        for i in range(ls.q_t + 1)
    ])
    maps.setflags(write=False)
    return SlabDeformation(levelset=ls, coeff_maps=maps, active=active)


def identity_deformation(ls: LevelSetSlab) -> SlabDeformation:
    """Deformation without displacement.

    Args:
        ls (LevelSetSlab): The level set providing mesh and time basis.

    Returns:
        SlabDeformation: The identity mapping.
    """
    maps = np.zeros_like(ls.coeff_funcs)
    maps.setflags(write=False)
    active = np.zeros(ls.mesh.n_elements, dtype=bool)
    return SlabDeformation(levelset=ls, coeff_maps=maps, active=active)


def map_on_element(
    deformation: SlabDeformation,
    element: npt.ArrayLike,
    xi: npt.ArrayLike,
    t: npt.ArrayLike,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Evaluate Theta and its derivatives through element polynomials.

    Reference points outside [-1, 1] evaluate the polynomial extension of
    the element's mapping.

    Args:
        deformation (SlabDeformation): The deformation.
        element (ArrayLike): Element per point.
        xi (ArrayLike): Reference coordinate per point.
        t (ArrayLike): Time per point.

    Returns:
        tuple[FloatArray, FloatArray, FloatArray]: Theta, dTheta/dx and
            dTheta/dt.
    """
    ls = deformation.levelset
    mesh = ls.mesh
    element, xi, t = np.broadcast_arrays(
        np.asarray(element), np.asarray(xi, dtype=np.float64), np.asarray(t)
    )
    x = mesh.from_reference(element, xi)
    if not deformation.active.any():
        return x, np.ones_like(x), np.zeros_like(x)

    basis = ls.spatial_basis
    nodal = np.moveaxis(deformation.coeff_maps[:, element, :], 0, -2)
    disp = np.einsum("...ia,...a->...i", nodal, basis.values(xi))
    ddisp = np.einsum("...ia,...a->...i", nodal, basis.derivatives(xi)) * (
        2.0 / mesh.h
    )
    temporal = ls.temporal_values(t)
    temporal_dt = ls.temporal_derivatives(t)
    theta = x + np.sum(temporal * disp, axis=-1)
    jac = 1.0 + np.sum(temporal * ddisp, axis=-1)
    theta_t = np.sum(temporal_dt * disp, axis=-1)
    return theta, jac, theta_t


def eval_deformation(
    deformation: SlabDeformation, x: npt.ArrayLike, t: npt.ArrayLike
) -> FloatArray:
    """Evaluate Theta(x, t).

    Args:
        deformation (SlabDeformation): The deformation.
        x (ArrayLike): Undeformed points in the mesh domain.
        t (ArrayLike): Times in the slab.

    Returns:
        FloatArray: Deformed points.
    """
    mesh = deformation.mesh
    element = mesh.locate(x)
    theta, _, _ = map_on_element(deformation, element, mesh.to_reference(element, x), t)
    return theta


def eval_jacobian(
    deformation: SlabDeformation, x: npt.ArrayLike, t: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Evaluate the partial derivatives of Theta.

    The space-time Jacobian determinant of (x, t) -> (Theta, t) equals the
    spatial derivative.

    Args:
        deformation (SlabDeformation): The deformation.
        x (ArrayLike): Undeformed points in the mesh domain.
        t (ArrayLike): Times in the slab.

    Returns:
        tuple[FloatArray, FloatArray]: dTheta/dx and dTheta/dt.
    """
    mesh = deformation.mesh
    element = mesh.locate(x)
    _, jac, theta_t = map_on_element(
        deformation, element, mesh.to_reference(element, x), t
    )
    return jac, theta_t


def invert_on_element(
    deformation: SlabDeformation,
    element: npt.ArrayLike,
    y: npt.ArrayLike,
    t: npt.ArrayLike,
    *,
    tol: float = INVERSION_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
) -> FloatArray:
    """Reference coordinates mapped onto given points by element polynomials.

    Newton's method runs on all points at once. Points where it meets a
    non-positive Jacobian or does not converge are solved one by one with
    a safeguarded Newton iteration started from the nearest point of the
    element, with a bracketing fallback within one mesh size. Only
    preimages with a positive Jacobian are accepted.

    Args:
        deformation (SlabDeformation): The deformation.
        element (ArrayLike): Element per point.
        y (ArrayLike): Deformed points.
        t (ArrayLike): Time per point.
        tol (float): Tolerance relative to h.
        max_iter (int): Newton iteration cap.

    Returns:
        FloatArray: Reference coordinates, possibly outside [-1, 1].

    Raises:
        DeformationError: If a point has no preimage near its target.
    """
    mesh = deformation.mesh
    element, y, t = np.broadcast_arrays(
        np.asarray(element), np.asarray(y, dtype=np.float64), np.asarray(t)
    )
    if not deformation.active[element].any():
        return mesh.to_reference(element, y)

    shape = y.shape
    element, y, t = element.ravel(), y.ravel(), t.ravel()
    xi = np.array(mesh.to_reference(element, y), dtype=np.float64)
    pending = np.arange(xi.size)
    fallback: list[IntArray] = []
    for _ in range(max_iter):
        theta, jac, _ = map_on_element(
            deformation, element[pending], xi[pending], t[pending]
        )
        regular = jac > 0.0
        step = (theta - y[pending]) / np.where(regular, jac, 1.0)
        xi[pending] -= np.where(regular, step, 0.0) * (2.0 / mesh.h)
        fallback.append(pending[~regular])
        pending = pending[regular & (np.abs(step) > tol * mesh.h)]
        if pending.size == 0:
            break
    fallback.append(pending)

    for i in np.concatenate(fallback):
        xi[i] = _bracketed_inverse(
            deformation,
            int(element[i]),
            float(y[i]),
            float(t[i]),
            tol=tol,
            max_iter=max_iter,
        )
    return xi.reshape(shape)


def _bracketed_inverse(
    deformation: SlabDeformation,
    element: int,
    y: float,
    t: float,
    *,
    tol: float,
    max_iter: int,
) -> float:
    mesh = deformation.mesh

    def residual(x: float) -> float:
        theta, _, _ = map_on_element(deformation, element, mesh.to_reference(element, x), t)
        return float(theta) - y

    def slope(x: float) -> float:
        _, jac, _ = map_on_element(deformation, element, mesh.to_reference(element, x), t)
        return float(jac)

    xi0 = np.clip(mesh.to_reference(element, y), -1.0, 1.0)
    x0 = float(mesh.from_reference(element, xi0))
    x = _safeguarded_root(residual, slope, x0, mesh.h, tol=tol * mesh.h, max_iter=max_iter)
    if x is None or slope(x) <= 0.0:
        error = (
            f"No preimage of y={y:.6g} with positive Jacobian on element "
            f"{element} at t={t:.6g}."
        )
        raise DeformationError(error)
    return float(mesh.to_reference(element, x))


def pull_back(
    deformation: SlabDeformation,
    y: npt.ArrayLike,
    t: npt.ArrayLike,
    *,
    tol: float = INVERSION_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
) -> tuple[IntArray, FloatArray]:
    """Element and reference coordinate of deformed points.

    Vertices are fixed and the mapping is monotone on every element, so the
    deformed point lies in the same element as its preimage.

    Args:
        deformation (SlabDeformation): The deformation.
        y (ArrayLike): Deformed points in the mesh domain.
        t (ArrayLike): Times in the slab.
        tol (float): Tolerance relative to h.
        max_iter (int): Newton iteration cap.

    Returns:
        tuple[IntArray, FloatArray]: Elements and reference coordinates.
    """
    y, t = np.broadcast_arrays(np.asarray(y, dtype=np.float64), np.asarray(t))
    element = deformation.mesh.locate(y)
    xi = invert_on_element(deformation, element, y, t, tol=tol, max_iter=max_iter)
    return element, xi


def invert_at_time(
    deformation: SlabDeformation,
    y: npt.ArrayLike,
    t: npt.ArrayLike,
    *,
    tol: float = INVERSION_TOLERANCE,
    max_iter: int = NEWTON_MAX_ITERATIONS,
) -> FloatArray:
    """Undeformed points x with Theta(x, t) = y.

    Args:
        deformation (SlabDeformation): The deformation.
        y (ArrayLike): Deformed points in the mesh domain.
        t (ArrayLike): Times in the slab.
        tol (float): Tolerance relative to h.
        max_iter (int): Newton iteration cap.

    Returns:
        FloatArray: Undeformed points.
    """
    element, xi = pull_back(deformation, y, t, tol=tol, max_iter=max_iter)
    return deformation.mesh.from_reference(element, xi)


def require_positive_jacobian(jac: FloatArray, where: str) -> None:
    """Check local invertibility at evaluation points.

    Args:
        jac (FloatArray): Values of dTheta/dx.
        where (str): Description of the evaluation points for the message.

    Raises:
        DeformationError: If any value is not positive.
    """
    if jac.size and not np.all(jac > 0.0):
        error = f"Non-positive deformation Jacobian {np.min(jac):.3e} at {where}."
        raise DeformationError(error)


def _node_grid(mesh: BackgroundMesh, degree: int) -> tuple[IntArray, FloatArray]:
    xi = lagrange_basis(degree).nodes
    shape = (mesh.n_elements, degree + 1)
    element = np.broadcast_to(np.arange(mesh.n_elements)[:, None], shape)
    return element, np.broadcast_to(xi, element.shape)


def transfer_elementwise(
    u_minus: FloatArray,
    def_minus: SlabDeformation,
    def_plus: SlabDeformation,
) -> FloatArray:
    """Element-wise transfer between differently deformed meshes.

    On every element the result interpolates, at the Lagrange nodes x_j,
    the old element polynomial evaluated at the preimage of Theta+(x_j)
    under Theta-, both at the slab interface time.

    Args:
        u_minus (FloatArray): Old coefficients per element, (n_elements, k + 1).
        def_minus (SlabDeformation): Deformation of the previous slab.
        def_plus (SlabDeformation): Deformation of the current slab.

    Returns:
        FloatArray: New coefficients per element.
    """
    degree = u_minus.shape[1] - 1
    xi_old = _transfer_points(degree, def_minus, def_plus)
    values = lagrange_basis(degree).values(xi_old)
    return np.einsum("ija,ia->ij", values, u_minus)


def _transfer_points(
    degree: int, def_minus: SlabDeformation, def_plus: SlabDeformation
) -> FloatArray:
    t_n = def_plus.t_lo
    element, xi = _node_grid(def_plus.mesh, degree)
    y, _, _ = map_on_element(def_plus, element, xi, t_n)
    return invert_on_element(def_minus, element, y, t_n)


def transfer_continuous(
    u_minus: FloatArray,
    def_minus: SlabDeformation,
    def_plus: SlabDeformation,
    dofs: SpatialDofTable,
) -> FloatArray:
    """Conforming transfer, averaging the element-wise result at vertices.

    Args:
        u_minus (FloatArray): Old coefficients per element.
        def_minus (SlabDeformation): Deformation of the previous slab.
        def_plus (SlabDeformation): Deformation of the current slab.
        dofs (SpatialDofTable): Dof table of the spatial space.

    Returns:
        FloatArray: Global coefficient vector.
    """
    return dofs.average(transfer_elementwise(u_minus, def_minus, def_plus))


def transfer_time_derivative(
    u_minus: FloatArray,
    du_minus: FloatArray,
    def_minus: SlabDeformation,
    def_plus: SlabDeformation,
) -> tuple[FloatArray, FloatArray]:
    """Transfer a trace and its time derivative at fixed undeformed points.

    ``du_minus`` is the time derivative of the old solution at fixed
    undeformed position. It is turned into the physical time derivative
    through Theta- and back into a derivative at fixed undeformed position
    through Theta+.

    Args:
        u_minus (FloatArray): Old value coefficients per element.
        du_minus (FloatArray): Old time derivative coefficients per element.
        def_minus (SlabDeformation): Deformation of the previous slab.
        def_plus (SlabDeformation): Deformation of the current slab.

    Returns:
        tuple[FloatArray, FloatArray]: New value and time derivative
            coefficients per element.
    """
    degree = u_minus.shape[1] - 1
    mesh = def_plus.mesh
    t_n = def_plus.t_lo
    element, xi = _node_grid(mesh, degree)
    y, _, theta_t_plus = map_on_element(def_plus, element, xi, t_n)
    xi_old = invert_on_element(def_minus, element, y, t_n)
    _, jac_minus, theta_t_minus = map_on_element(def_minus, element, xi_old, t_n)

    basis = lagrange_basis(degree)
    values = np.einsum("ija,ia->ij", basis.values(xi_old), u_minus)
    dvalues = np.einsum("ija,ia->ij", basis.values(xi_old), du_minus)
    dx_ref = np.einsum("ija,ia->ij", basis.derivatives(xi_old), u_minus) * (
        2.0 / mesh.h
    )
    # u_t at fixed y is dvalues - theta_t_minus * u_y, u_y = dx_ref / jac_minus
    u_y = dx_ref / jac_minus
    return values, dvalues + (theta_t_plus - theta_t_minus) * u_y


def interpolate_initial(
    deformation: SlabDeformation,
    degree: int,
    u0: Callable[[FloatArray], FloatArray],
    u0_dt: Callable[[FloatArray], FloatArray] | None = None,
) -> tuple[FloatArray, FloatArray | None]:
    """Interpolate initial data at the deformed nodes of the first slab.

    Args:
        deformation (SlabDeformation): Deformation of the first slab.
        degree (int): Spatial polynomial degree.
        u0 (Callable): Initial value u(x, t_0).
        u0_dt (Callable | None): Physical time derivative at t_0.

    Returns:
        tuple[FloatArray, FloatArray | None]: Value and, if requested, time
            derivative coefficients per element at fixed undeformed points.
    """
    mesh = deformation.mesh
    t_0 = deformation.t_lo
    element, xi = _node_grid(mesh, degree)
    y, jac, theta_t = map_on_element(deformation, element, xi, t_0)
    values = np.asarray(u0(y), dtype=np.float64)
    if u0_dt is None:
        return values, None

    basis = lagrange_basis(degree)
    dx_ref = np.einsum("ija,ia->ij", basis.derivatives(xi), values) * (2.0 / mesh.h)
    derivs = np.asarray(u0_dt(y), dtype=np.float64) + theta_t * dx_ref / jac
    return values, derivs


def deformation_jump(def_minus: SlabDeformation, def_plus: SlabDeformation) -> float:
    """Largest jump of the deformation across a slab interface.

    Args:
        def_minus (SlabDeformation): Deformation of the previous slab.
        def_plus (SlabDeformation): Deformation of the current slab.

    Returns:
        float: max |Theta-(x_j, t_n) - Theta+(x_j, t_n)| over geometry nodes.
    """
    element, xi = _node_grid(def_plus.mesh, def_plus.q_s)
    t_n = def_plus.t_lo
    before, _, _ = map_on_element(def_minus, element, xi, t_n)
    after, _, _ = map_on_element(def_plus, element, xi, t_n)
    return float(np.max(np.abs(before - after)))
