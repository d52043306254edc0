#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Assembly of the slab systems of the four time discretisations.

Forms are integrated on the undeformed reference geometry and pulled back
through the slab deformation: weights carry dTheta/dx, spatial derivatives
are divided by it, and time derivatives at a fixed deformed point pick up
the transport term -(dTheta/dt)/(dTheta/dx) d/dx.

Matrix entries are only created for unknowns. Entries of the constrained
initial layers are moved to the right-hand side by the volume, upwind and
collocation forms; the ghost penalties drop them.
"""

from __future__ import annotations

import typing as t

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from stfem.const import GHOST_PENALTIES, METHODS
from stfem.exc import SpaceError

from .deform import invert_on_element, map_on_element, require_positive_jacobian
from .polynomials import gauss_points_for_exactness, gauss_rule, gauss_rule_on, lagrange_basis
from .quadrature import QuadratureOptions, fixed_time_cut_rule, space_time_rule


if t.TYPE_CHECKING:
    from .deform import SlabDeformation
    from .levelset import ProblemDefinition
    from .mesh import BoolArray, IntArray
    from .polynomials import FloatArray
    from .regions import ActiveRegions
    from .spaces import SlabSpace, TemporalBasis


@dataclass(frozen=True, eq=False)
class SlabSystem:
    """Square linear system of one slab."""

    matrix: FloatArray = field(repr=False)
    rhs: FloatArray = field(repr=False)
    dof_map: IntArray = field(repr=False)
    """(spatial dof, temporal index) of every unknown."""

    nze: int
    """Number of structurally non-zero matrix entries."""

    method: METHODS

    @property
    def size(self) -> int:
        """Number of unknowns."""
        return len(self.rhs)


class FormAccumulator:
    """Dense matrix and right-hand side collecting local contributions."""

    def __init__(self, size: int) -> None:
        """Initialize an empty accumulator.

        Args:
            size (int): Number of unknowns and test functions.
        """
        self.matrix = np.zeros((size, size))
        self.rhs = np.zeros(size)
        self.touched = np.zeros((size, size), dtype=bool)

    @property
    def nze(self) -> int:
        """Number of entries touched by any contribution."""
        return int(np.count_nonzero(self.touched))

    def add(
        self,
        rows: IntArray,
        cols: IntArray,
        block: FloatArray,
        initial: FloatArray | None = None,
    ) -> None:
        """Add a local block.

        Args:
            rows (IntArray): System rows of the local test functions, -1 to skip.
            cols (IntArray): System columns of the local trial functions,
                -1 for entries that are not unknowns.
            block (FloatArray): Local matrix (rows, cols).
            initial (FloatArray | None): Initial data of the local trial
                functions, zero where not constrained. None drops them.
        """
        row_ok = rows >= 0
        if not row_ok.any():
            return
        r = rows[row_ok]
        local = block[row_ok]
        col_ok = cols >= 0
        if col_ok.any():
            c = cols[col_ok]
            np.add.at(self.matrix, (r[:, None], c[None, :]), local[:, col_ok])
            self.touched[r[:, None], c[None, :]] = True
        if initial is not None:
            np.add.at(self.rhs, r, -(local @ initial))

    def add_rhs(self, rows: IntArray, values: FloatArray) -> None:
        """Add a local right-hand side.

        Args:
            rows (IntArray): System rows of the local test functions.
            values (FloatArray): Local values.
        """
        ok = rows >= 0
        np.add.at(self.rhs, rows[ok], values[ok])


@dataclass(frozen=True)
class _TestLayout:
    index: IntArray
    """Row of every (temporal index, spatial dof)."""

    basis: TemporalBasis | None
    """Temporal test basis; None for a pointwise-in-time block."""


def _galerkin_rows(space: SlabSpace) -> _TestLayout:
    return _TestLayout(index=space.test_index, basis=space.test_basis)


def _collocation_rows(space: SlabSpace) -> _TestLayout:
    if space.collocation_index is None:
        error = f"Method {space.method} has no collocation block."
        raise SpaceError(error)
    return _TestLayout(index=space.collocation_index[None, :], basis=None)


def _shape(space: SlabSpace, xi: FloatArray) -> tuple[FloatArray, FloatArray]:
    basis = lagrange_basis(space.k_s)
    h = space.dofs.mesh.h
    return basis.values(xi), basis.derivatives(xi) * (2.0 / h)


def _tensor(temporal: FloatArray, spatial: FloatArray) -> FloatArray:
    points = spatial.shape[0]
    return (temporal[:, :, None] * spatial[:, None, :]).reshape(points, -1)


def _trial_local(
    space: SlabSpace,
    element: int,
    xi: FloatArray,
    t: FloatArray,
    jac: FloatArray,
    theta_t: FloatArray,
    initial: FloatArray | None,
) -> tuple[IntArray, FloatArray | None, FloatArray, FloatArray, FloatArray]:
    """Columns, initial data, value, x- and t-derivative of local trial functions."""
    local = space.dofs.element_dofs[element]
    n, dn = _shape(space, xi)
    p = space.trial_basis.values(t)
    dp = space.trial_basis.derivatives(t)
    value = _tensor(p, n)
    dx_ref = _tensor(p, dn)
    dx = dx_ref / jac[:, None]
    dt = _tensor(dp, n) - (theta_t / jac)[:, None] * dx_ref

    cols = space.trial_index[:, local].ravel()
    data = None
    if initial is not None:
        data = np.where(space.constrained[:, local], initial[:, local], 0.0).ravel()
    return cols, data, value, dx, dt


def _test_local(
    layout: _TestLayout,
    space: SlabSpace,
    element: int,
    xi: FloatArray,
    t: FloatArray,
    jac: FloatArray,
) -> tuple[IntArray, FloatArray, FloatArray]:
    """Rows, value and x-derivative of local test functions."""
    local = space.dofs.element_dofs[element]
    n, dn = _shape(space, xi)
    if layout.basis is None:
        p = np.ones((len(xi), 1))
    else:
        p = layout.basis.values(t)
    rows = layout.index[:, local].ravel()
    return rows, _tensor(p, n), _tensor(p, dn) / jac[:, None]


def _spatial_order(space: SlabSpace, deformation: SlabDeformation, order: int | None) -> int:
    return order if order is not None else 2 * space.k_s + deformation.q_s


def _convection_diffusion(
    forms: FormAccumulator,
    rows: IntArray,
    test: tuple[FloatArray, FloatArray],
    trial: tuple[IntArray, FloatArray | None, FloatArray, FloatArray, FloatArray],
    weights: FloatArray,
    velocity: FloatArray,
    source: FloatArray,
) -> None:
    v, vx = test
    cols, data, _, ux, ut = trial
    block = np.einsum("p,pr,pc->rc", weights, v, ut + velocity[:, None] * ux)
    block += np.einsum("p,pr,pc->rc", weights, vx, ux)
    forms.add(rows, cols, block, data)
    forms.add_rhs(rows, np.einsum("p,p,pr->r", weights, source, v))


@dataclass(frozen=True, eq=False)
class _LocalForm:
    """Contribution of one element, added to the accumulator in element order."""

    rows: IntArray
    cols: IntArray
    block: FloatArray
    initial: FloatArray | None
    rhs: FloatArray


def _volume_element(
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
    element: int,
    *,
    order: int,
    options: QuadratureOptions,
    initial: FloatArray | None,
) -> _LocalForm | None:
    ls = deformation.levelset
    rule = space_time_rule(ls, element, space.k_t, order, options)
    if rule.size == 0:
        return None
    xi = ls.mesh.to_reference(element, rule.x)
    y, jac, theta_t = map_on_element(deformation, element, xi, rule.t)
    require_positive_jacobian(jac, f"element {element} of slab {ls.slab_index}")

    cols, data, _, ux, ut = _trial_local(space, element, xi, rule.t, jac, theta_t, initial)
    rows, v, vx = _test_local(_galerkin_rows(space), space, element, xi, rule.t, jac)
    weights = rule.weights * jac
    velocity = np.asarray(prob.w(y, rule.t), dtype=np.float64)
    source = np.asarray(prob.f(y, rule.t), dtype=np.float64)
    block = np.einsum("p,pr,pc->rc", weights, v, ut + velocity[:, None] * ux)
    block += np.einsum("p,pr,pc->rc", weights, vx, ux)
    rhs = np.einsum("p,p,pr->r", weights, source, v)
    return _LocalForm(rows=rows, cols=cols, block=block, initial=data, rhs=rhs)


def assemble_volume(
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
    elements: BoolArray,
    *,
    options: QuadratureOptions | None = None,
    initial: FloatArray | None = None,
    forms: FormAccumulator | None = None,
    workers: int = 1,
) -> FormAccumulator:
    """Volume form (du/dt + w du/dx, v) + (du/dx, dv/dx) and source (f, v).

    Element contributions are independent. With more than one worker they
    are computed in a thread pool; they are always added in element order,
    so the result does not depend on the number of workers.

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        prob (ProblemDefinition): The problem.
        elements (BoolArray): Elements to integrate over.
        options (QuadratureOptions | None): Space-time rule selection.
        initial (FloatArray | None): Data of the constrained layers.
        forms (FormAccumulator | None): Accumulator to add to.
        workers (int): Number of assembly threads.

    Returns:
        FormAccumulator: The accumulator.
    """
    options = options or QuadratureOptions()
    forms = forms or FormAccumulator(space.n_trial)
    local = partial(
        _volume_element,
        space,
        deformation,
        prob,
        order=_spatial_order(space, deformation, options.spatial_order),
        options=options,
        initial=initial,
    )
    indices = [int(element) for element in np.nonzero(elements)[0]]

    if workers > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            contributions = list(executor.map(local, indices))
    else:
        contributions = [local(element) for element in indices]

    for contribution in contributions:
        if contribution is None:
            continue
        forms.add(
            contribution.rows, contribution.cols, contribution.block, contribution.initial
        )
        forms.add_rhs(contribution.rows, contribution.rhs)
    return forms


def assemble_upwind(
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
    *,
    previous: FloatArray | None = None,
    spatial_order: int | None = None,
    forms: FormAccumulator | None = None,
) -> FormAccumulator:
    """Upwind coupling (u_+, v_+) = (u_-, v_+) on Omega^h(t_{n-1}).

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        prob (ProblemDefinition): The problem; its u0 is used on the first slab.
        previous (FloatArray | None): Transferred previous trace per element,
            (n_elements, k_s + 1). None integrates the initial value.
        spatial_order (int | None): Spatial exactness degree.
        forms (FormAccumulator | None): Accumulator to add to.

    Returns:
        FormAccumulator: The accumulator.
    """
    forms = forms or FormAccumulator(space.n_trial)
    t_lo = deformation.t_lo
    order = _spatial_order(space, deformation, spatial_order)
    layout = _galerkin_rows(space)

    for element in range(deformation.mesh.n_elements):
        rule = fixed_time_cut_rule(deformation, element, t_lo, order)
        if rule.weights.size == 0:
            continue
        tt = np.full(rule.xi.shape, t_lo)
        ones = np.ones_like(rule.xi)
        cols, _, u, _, _ = _trial_local(
            space, element, rule.xi, tt, ones, np.zeros_like(rule.xi), None
        )
        rows, v, _ = _test_local(layout, space, element, rule.xi, tt, ones)
        forms.add(rows, cols, np.einsum("p,pr,pc->rc", rule.weights, v, u))

        if previous is None:
            data = np.asarray(prob.u0(rule.y), dtype=np.float64)
        else:
            n, _ = _shape(space, rule.xi)
            data = n @ previous[element]
        forms.add_rhs(rows, np.einsum("p,p,pr->r", rule.weights, data, v))
    return forms


def assemble_ghost_penalty(
    space: SlabSpace,
    deformation: SlabDeformation,
    facets: IntArray,
    mode: GHOST_PENALTIES,
    gamma_j: float,
    *,
    time: float | None = None,
    collocation: bool = False,
    spatial_order: int | None = None,
    forms: FormAccumulator | None = None,
) -> FormAccumulator:
    """Direct ghost penalty on facet patches.

    On each side of a facet the jump is the difference between the function
    on that element and the polynomial extension of the neighbour, evaluated
    through the extended neighbour mapping. The patch integral is scaled by
    1 / h^2.

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        facets (IntArray): Interior vertex indices of the facets.
        mode (GHOST_PENALTIES): Time-integrated over the slab with
            (1 + dt/h) gamma_J, or spatial at one time with gamma_J.
        gamma_j (float): Ghost penalty parameter.
        time (float | None): Time of the spatial mode, t_n by default.
        collocation (bool): Use the collocation rows as test functions.
        spatial_order (int | None): Spatial exactness degree.
        forms (FormAccumulator | None): Accumulator to add to.

    Returns:
        FormAccumulator: The accumulator.
    """
    forms = forms or FormAccumulator(space.n_trial)
    mesh = deformation.mesh
    h = mesh.h
    if mode is GHOST_PENALTIES.TIME_INTEGRATED:
        times, time_weights = gauss_rule_on(
            deformation.t_lo, deformation.t_hi, 2 * (space.k_t + 1)
        )
        gamma = (1.0 + (deformation.t_hi - deformation.t_lo) / h) * gamma_j
    else:
        times = np.array([deformation.t_hi if time is None else time])
        time_weights = np.ones(1)
        gamma = gamma_j

    order = _spatial_order(space, deformation, spatial_order)
    ref, ref_weights = gauss_rule(gauss_points_for_exactness(order))
    xi = np.tile(ref, len(times))
    tt = np.repeat(times, len(ref))
    weights = np.outer(time_weights, ref_weights * 0.5 * h).ravel()
    layout = _collocation_rows(space) if collocation else _galerkin_rows(space)
    basis = lagrange_basis(space.k_s)

    for facet in np.asarray(facets, dtype=np.intp):
        patch = mesh.facet_patch(int(facet))
        for own, other in (patch, patch[::-1]):
            y, jac, _ = map_on_element(deformation, own, xi, tt)
            require_positive_jacobian(jac, f"patch of facet {facet}")
            xi_other = invert_on_element(deformation, other, y, tt)
            n_own = basis.values(xi)
            n_other = basis.values(xi_other)

            p = space.trial_basis.values(tt)
            jump_u = np.concatenate((_tensor(p, n_own), -_tensor(p, n_other)), axis=1)
            cols = np.concatenate((
                space.trial_index[:, space.dofs.element_dofs[own]].ravel(),
                space.trial_index[:, space.dofs.element_dofs[other]].ravel(),
            ))
            q = np.ones((len(tt), 1)) if layout.basis is None else layout.basis.values(tt)
            jump_v = np.concatenate((_tensor(q, n_own), -_tensor(q, n_other)), axis=1)
            rows = np.concatenate((
                layout.index[:, space.dofs.element_dofs[own]].ravel(),
                layout.index[:, space.dofs.element_dofs[other]].ravel(),
            ))
            scale = gamma / h**2 * weights * jac
            forms.add(rows, cols, np.einsum("p,pr,pc->rc", scale, jump_v, jump_u))
    return forms


def assemble_collocation(
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
    *,
    initial: FloatArray | None = None,
    spatial_order: int | None = None,
    forms: FormAccumulator | None = None,
) -> FormAccumulator:
    """Collocated weak residual rows at the collocation times.

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        prob (ProblemDefinition): The problem.
        initial (FloatArray | None): Data of the constrained layers.
        spatial_order (int | None): Spatial exactness degree.
        forms (FormAccumulator | None): Accumulator to add to.

    Returns:
        FormAccumulator: The accumulator.
    """
    forms = forms or FormAccumulator(space.n_trial)
    layout = _collocation_rows(space)
    order = _spatial_order(space, deformation, spatial_order)

    for time in space.collocation_times:
        for element in range(deformation.mesh.n_elements):
            rule = fixed_time_cut_rule(deformation, element, time, order)
            if rule.weights.size == 0:
                continue
            tt = np.full(rule.xi.shape, time)
            _, jac, theta_t = map_on_element(deformation, element, rule.xi, tt)
            trial = _trial_local(space, element, rule.xi, tt, jac, theta_t, initial)
            rows, v, vx = _test_local(layout, space, element, rule.xi, tt, jac)
            _convection_diffusion(
                forms,
                rows,
                (v, vx),
                trial,
                rule.weights,
                np.asarray(prob.w(rule.y, tt), dtype=np.float64),
                np.asarray(prob.f(rule.y, tt), dtype=np.float64),
            )
    return forms


def assemble_boundary_flux(
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
    *,
    collocation: bool = False,
    forms: FormAccumulator | None = None,
) -> FormAccumulator:
    """Natural boundary term where the domain reaches the mesh boundary.

    Adds (du/dn, v) at the two mesh end points while phi^lin is negative
    there. Vertices are fixed by the deformation, so the end points are not
    moved.

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        prob (ProblemDefinition): The problem; nothing is added without a
            Neumann flux.
        collocation (bool): Add to the collocation rows at the collocation
            times instead of the Galerkin rows.
        forms (FormAccumulator | None): Accumulator to add to.

    Returns:
        FormAccumulator: The accumulator.
    """
    forms = forms or FormAccumulator(space.n_trial)
    if prob.neumann_flux is None:
        return forms

    ls = deformation.levelset
    mesh = ls.mesh
    if collocation:
        layout = _collocation_rows(space)
        times = np.asarray(space.collocation_times, dtype=np.float64)
        weights = np.ones_like(times)
    else:
        layout = _galerkin_rows(space)
        times, weights = gauss_rule_on(ls.t_lo, ls.t_hi, 2 * (space.k_t + 1))

    ends = ((0, 0, -1.0), (mesh.n_vertices - 1, mesh.n_elements - 1, 1.0))
    for vertex, element, normal in ends:
        inside = ls.temporal_values(times) @ ls.lin_coeff_funcs[:, vertex] < 0.0
        if not inside.any():
            continue
        xi = np.full(times.shape, normal)
        rows, v, _ = _test_local(layout, space, element, xi, times, np.ones_like(times))
        x = np.full(times.shape, mesh.vertices[vertex])
        flux = np.asarray(prob.neumann_flux(x, times), dtype=np.float64) * normal
        forms.add_rhs(rows, np.einsum("p,p,pr->r", weights * inside, flux, v))
    return forms


def assemble_slab(
    space: SlabSpace,
    deformation: SlabDeformation,
    regions: ActiveRegions,
    prob: ProblemDefinition,
    *,
    gamma_j: float,
    options: QuadratureOptions | None = None,
    initial: FloatArray | None = None,
    previous: FloatArray | None = None,
    workers: int = 1,
) -> SlabSystem:
    """Assemble the system of one slab for the method of its space.

    Args:
        space (SlabSpace): The slab space.
        deformation (SlabDeformation): Deformation of the slab.
        regions (ActiveRegions): Regions of the slab.
        prob (ProblemDefinition): The problem.
        gamma_j (float): Ghost penalty parameter.
        options (QuadratureOptions | None): Space-time rule selection.
        initial (FloatArray | None): Data of the constrained layers of the
            continuous methods.
        previous (FloatArray | None): Transferred previous trace per element
            for the DG upwind term; None on the first slab.
        workers (int): Number of threads assembling the volume form.

    Returns:
        SlabSystem: The system.
    """
    options = options or QuadratureOptions()
    order = options.spatial_order
    forms = FormAccumulator(space.n_trial)
    elements = regions.elems_e
    if space.method in {METHODS.CGBOX, METHODS.GCC}:
        elements = elements | regions.elems_eplus
    assemble_volume(
        space,
        deformation,
        prob,
        elements,
        options=options,
        initial=initial,
        forms=forms,
        workers=workers,
    )
    assemble_boundary_flux(space, deformation, prob, forms=forms)

    ghost = GHOST_PENALTIES
    match space.method:
        case METHODS.DG:
            assemble_upwind(
                space, deformation, prob, previous=previous, spatial_order=order, forms=forms
            )
            assemble_ghost_penalty(
                space, deformation, regions.facets_rext, ghost.TIME_INTEGRATED,
                gamma_j, spatial_order=order, forms=forms,
            )
        case METHODS.CG:
            assemble_ghost_penalty(
                space, deformation, regions.facets_rext, ghost.TIME_INTEGRATED,
                gamma_j, spatial_order=order, forms=forms,
            )
            assemble_ghost_penalty(
                space, deformation, regions.facets_rplus, ghost.SPATIAL,
                gamma_j, spatial_order=order, forms=forms,
            )
        case METHODS.CGBOX:
            assemble_ghost_penalty(
                space, deformation, regions.facets_rplus, ghost.TIME_INTEGRATED,
                gamma_j, spatial_order=order, forms=forms,
            )
        case METHODS.GCC:
            assemble_ghost_penalty(
                space, deformation, regions.facets_rplus, ghost.TIME_INTEGRATED,
                gamma_j, spatial_order=order, forms=forms,
            )
            assemble_collocation(
                space, deformation, prob, initial=initial, spatial_order=order, forms=forms
            )
            assemble_ghost_penalty(
                space, deformation, regions.facets_rplus, ghost.SPATIAL,
                gamma_j, collocation=True, spatial_order=order, forms=forms,
            )
            assemble_boundary_flux(space, deformation, prob, collocation=True, forms=forms)

    forms.matrix.setflags(write=False)
    forms.rhs.setflags(write=False)
    return SlabSystem(
        matrix=forms.matrix,
        rhs=forms.rhs,
        dof_map=space.dof_map,
        nze=forms.nze,
        method=space.method,
    )
