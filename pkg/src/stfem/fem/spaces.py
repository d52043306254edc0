#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Temporal bases and the space-time trial and test spaces of a slab.

Coefficients of a slab function are stored as an array of shape
(k_t + 1, n_dofs): one global spatial coefficient vector per temporal basis
function. A slab space marks which entries are unknowns, which carry
initial data from the previous slab, and how the test functions are laid
out.
"""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from numpy.polynomial import polynomial as power

from stfem.const import METHODS, TEMPORAL_KINDS
from stfem.exc import SpaceError

from .deform import map_on_element, pull_back
from .polynomials import lagrange_basis


if t.TYPE_CHECKING:
    import numpy.typing as npt

    from .deform import SlabDeformation
    from .dofs import SpatialDofTable
    from .mesh import BoolArray, IntArray
    from .polynomials import FloatArray
    from .regions import ActiveRegions


_HERMITE_ORDER = 3

# power coefficients in tau = (t - t_lo) / dt of value and slope functions
_HERMITE = np.array([
    [1.0, 0.0, -3.0, 2.0],
    [0.0, 1.0, -2.0, 1.0],
    [0.0, 0.0, 3.0, -2.0],
    [0.0, 0.0, -1.0, 1.0],
]).T


@dataclass(frozen=True, eq=False)
class TemporalBasis:
    """Temporal basis p_0, ..., p_k on a slab.

    Lagrange bases interpolate at the Gauss-Lobatto points; the order-0
    basis is the constant associated to the upper end point. The cubic
    Hermite basis holds value and slope functions at both ends, in the
    order (value lo, slope lo, value up, slope up).
    """

    kind: TEMPORAL_KINDS
    order: int
    t_lo: float
    t_hi: float

    @property
    def size(self) -> int:
        """Number of basis functions."""
        return self.order + 1

    @property
    def dt(self) -> float:
        """Slab length."""
        return self.t_hi - self.t_lo

    @property
    def lower_index(self) -> int | None:
        """Index of the function carrying the value at t_{n-1}."""
        if self.kind is TEMPORAL_KINDS.HERMITE:
            return 0
        return 0 if self.order > 0 else None

    @property
    def upper_index(self) -> int:
        """Index of the function carrying the value at t_n."""
        if self.kind is TEMPORAL_KINDS.HERMITE:
            return 2
        return self.order

    @property
    def slope_index(self) -> int | None:
        """Index of the function carrying the time derivative at t_{n-1}."""
        return 1 if self.kind is TEMPORAL_KINDS.HERMITE else None

    def _reference(self, t: npt.ArrayLike) -> FloatArray:
        return 2.0 * (np.asarray(t, dtype=np.float64) - self.t_lo) / self.dt - 1.0

    def values(self, t: npt.ArrayLike) -> FloatArray:
        """Values at given times, trailing axis over the basis.

        Args:
            t (ArrayLike): Times in the slab.

        Returns:
            FloatArray: Basis values.
        """
        if self.kind is TEMPORAL_KINDS.HERMITE:
            tau = 0.5 * (self._reference(t) + 1.0)
            scale = np.array([1.0, self.dt, 1.0, self.dt])
            return power.polyvander(tau, _HERMITE_ORDER) @ _HERMITE * scale
        return lagrange_basis(self.order).values(self._reference(t))

    def derivatives(self, t: npt.ArrayLike) -> FloatArray:
        """Time derivatives at given times, trailing axis over the basis.

        Args:
            t (ArrayLike): Times in the slab.

        Returns:
            FloatArray: Basis derivatives.
        """
        if self.kind is TEMPORAL_KINDS.HERMITE:
            tau = 0.5 * (self._reference(t) + 1.0)
            slopes = power.polyder(_HERMITE, axis=0)
            scale = np.array([1.0 / self.dt, 1.0, 1.0 / self.dt, 1.0])
            return power.polyvander(tau, _HERMITE_ORDER - 1) @ slopes * scale
        ref = self._reference(t)
        return lagrange_basis(self.order).derivatives(ref) * (2.0 / self.dt)


def build_temporal_basis(
    kind: TEMPORAL_KINDS, order: int, t_lo: float, t_hi: float
) -> TemporalBasis:
    """Build a temporal basis on a slab.

    Args:
        kind (TEMPORAL_KINDS): Basis family.
        order (int): Polynomial order k_t.
        t_lo (float): Slab start time.
        t_hi (float): Slab end time.

    Returns:
        TemporalBasis: The basis.

    Raises:
        SpaceError: If the family does not support the order.
    """
    if kind is TEMPORAL_KINDS.HERMITE and order != _HERMITE_ORDER:
        error = f"Cubic Hermite basis requires k_t = 3, got {order}."
        raise SpaceError(error)
    if order < 0:
        error = f"Temporal order must be non-negative, got {order}."
        raise SpaceError(error)
    return TemporalBasis(kind=kind, order=order, t_lo=t_lo, t_hi=t_hi)


@dataclass(frozen=True, eq=False)
class SlabSpace:
    """Trial and test layout of one slab.

    Index arrays have one row per temporal basis function and one column
    per spatial dof. Entries hold the position in the slab system, or -1
    where the combination is not an unknown (respectively not a test
    function).
    """

    method: METHODS
    k_s: int
    k_t: int
    dofs: SpatialDofTable = field(repr=False)
    trial_basis: TemporalBasis
    test_basis: TemporalBasis

    trial_index: IntArray = field(repr=False)
    """System column of every (temporal index, spatial dof)."""

    constrained: BoolArray = field(repr=False)
    """Entries fixed by data of the previous slab."""

    test_index: IntArray = field(repr=False)
    """System row of every (test temporal index, spatial dof)."""

    collocation_index: IntArray | None = field(repr=False)
    """System row of every spatial dof of the collocation block."""

    collocation_times: tuple[float, ...]
    """Collocation times."""

    trial_regions: tuple[str, ...]
    """Region providing the dofs of every temporal layer."""

    @property
    def n_trial(self) -> int:
        """Number of unknowns."""
        return int(np.count_nonzero(self.trial_index >= 0))

    @property
    def n_test(self) -> int:
        """Number of test functions including collocation rows."""
        count = int(np.count_nonzero(self.test_index >= 0))
        if self.collocation_index is not None:
            count += int(np.count_nonzero(self.collocation_index >= 0))
        return count

    @property
    def constrained_layers(self) -> tuple[int, ...]:
        """Temporal indices carrying initial data."""
        return tuple(int(i) for i in np.nonzero(self.constrained.any(axis=1))[0])

    @property
    def dof_map(self) -> IntArray:
        """(spatial dof, temporal index) of every unknown in system order."""
        layer, dof = np.nonzero(self.trial_index >= 0)
        order = np.argsort(self.trial_index[layer, dof])
        return np.stack((dof[order], layer[order]), axis=1)

    def reconstruct(self, solution: FloatArray, initial: FloatArray | None) -> FloatArray:
        """Full coefficient array from unknowns and initial data.

        Args:
            solution (FloatArray): Values of the unknowns.
            initial (FloatArray | None): Data of the constrained entries,
                shape (k_t + 1, n_dofs).

        Returns:
            FloatArray: Coefficients of shape (k_t + 1, n_dofs).
        """
        coeffs = np.zeros(self.trial_index.shape)
        if initial is not None:
            coeffs[self.constrained] = initial[self.constrained]
        active = self.trial_index >= 0
        coeffs[active] = solution[self.trial_index[active]]
        return coeffs


def _number(masks: list[BoolArray], start: int = 0) -> IntArray:
    index = np.full((len(masks), len(masks[0])), -1, dtype=np.intp)
    count = start
    for layer, mask in enumerate(masks):
        n = int(np.count_nonzero(mask))
        index[layer, mask] = np.arange(count, count + n)
        count += n
    return index


def build_slab_space(
    method: METHODS,
    k_s: int,
    k_t: int,
    regions: ActiveRegions,
    dofs: SpatialDofTable,
    t_lo: float,
    t_hi: float,
) -> SlabSpace:
    """Active trial and test dofs of a slab for a method.

    DG activates all temporal layers on E and tests with the same space. CG
    fixes the lower layer by the transferred trace, activates the upper
    layer on E+ and the others on E, and tests with order k_t - 1. CG box
    activates every unfixed layer on E+. GCC fixes value and slope at
    t_{n-1}, activates value and slope at t_n on E+, and tests with the
    constant function and one collocation block at t_n.

    Args:
        method (METHODS): Time discretisation.
        k_s (int): Spatial order.
        k_t (int): Temporal order.
        regions (ActiveRegions): Regions of the slab.
        dofs (SpatialDofTable): Spatial dof table of order k_s.
        t_lo (float): Slab start time.
        t_hi (float): Slab end time.

    Returns:
        SlabSpace: The space.

    Raises:
        SpaceError: If the orders do not fit the method, the trial space is
            empty, or trial and test counts differ.
    """
    on_e = dofs.dofs_on(regions.elems_e)
    on_eplus = dofs.dofs_on(regions.elems_eplus)
    none = np.zeros(dofs.n_dofs, dtype=bool)
    collocation_index = None
    collocation_times: tuple[float, ...] = ()

    if method is METHODS.GCC:
        trial = build_temporal_basis(TEMPORAL_KINDS.HERMITE, k_t, t_lo, t_hi)
        test = build_temporal_basis(TEMPORAL_KINDS.LAGRANGE, 0, t_lo, t_hi)
        trial_masks = [none, none, on_eplus, on_eplus]
        constrained = [on_eplus, on_eplus, none, none]
        regions_tag = ("init", "init", "E+", "E+")
        test_masks = [on_eplus]
    else:
        trial = build_temporal_basis(TEMPORAL_KINDS.LAGRANGE, k_t, t_lo, t_hi)
        if method is METHODS.DG:
            test = trial
            trial_masks = [on_e] * (k_t + 1)
            constrained = [none] * (k_t + 1)
            regions_tag = ("E",) * (k_t + 1)
            test_masks = trial_masks
        else:
            if k_t < 1:
                error = f"Continuous methods need k_t >= 1, got {k_t}."
                raise SpaceError(error)
            test = build_temporal_basis(TEMPORAL_KINDS.LAGRANGE, k_t - 1, t_lo, t_hi)
            inner = on_e if method is METHODS.CG else on_eplus
            trial_masks = [none, *[inner] * (k_t - 1), on_eplus]
            constrained = [inner, *[none] * k_t]
            tag = "E" if method is METHODS.CG else "E+"
            regions_tag = ("init", *[tag] * (k_t - 1), "E+")
            test_masks = [*[inner] * (k_t - 1), on_eplus]

    trial_index = _number(trial_masks)
    test_index = _number(test_masks)
    n_trial = int(np.count_nonzero(trial_index >= 0))
    n_rows = int(np.count_nonzero(test_index >= 0))
    if method is METHODS.GCC:
        collocation_index = _number([on_eplus], start=n_rows)[0]
        collocation_times = (t_hi,)
        n_rows += int(np.count_nonzero(on_eplus))

    if n_trial == 0:
        error = f"Empty trial space on slab {regions.slab_index}."
        raise SpaceError(error)
    if n_trial != n_rows:
        error = (
            f"Trial and test counts differ on slab {regions.slab_index}: "
            f"{n_trial} != {n_rows}."
        )
        raise SpaceError(error)

    constrained_mask = np.stack(constrained)
    for array in (trial_index, test_index, constrained_mask):
        array.setflags(write=False)
    return SlabSpace(
        method=method,
        k_s=k_s,
        k_t=k_t,
        dofs=dofs,
        trial_basis=trial,
        test_basis=test,
        trial_index=trial_index,
        constrained=constrained_mask,
        test_index=test_index,
        collocation_index=collocation_index,
        collocation_times=collocation_times,
        trial_regions=regions_tag,
    )


def eval_on_element(
    coeffs: FloatArray,
    space: SlabSpace,
    deformation: SlabDeformation,
    element: npt.ArrayLike,
    xi: npt.ArrayLike,
    t: npt.ArrayLike,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Evaluate a slab function at reference points of given elements.

    Args:
        coeffs (FloatArray): Coefficients of shape (k_t + 1, n_dofs).
        space (SlabSpace): The space.
        deformation (SlabDeformation): Deformation of the slab.
        element (ArrayLike): Element per point.
        xi (ArrayLike): Reference coordinate per point.
        t (ArrayLike): Time per point.

    Returns:
        tuple[FloatArray, FloatArray, FloatArray]: Value, derivative in the
            deformed coordinate and time derivative at fixed deformed point.
    """
    element, xi, t = np.broadcast_arrays(
        np.asarray(element), np.asarray(xi, dtype=np.float64), np.asarray(t)
    )
    basis = lagrange_basis(space.k_s)
    h = space.dofs.mesh.h
    local = np.moveaxis(coeffs[:, space.dofs.element_dofs[element]], 0, -2)
    spatial = np.einsum("...ia,...a->...i", local, basis.values(xi))
    spatial_dx = np.einsum("...ia,...a->...i", local, basis.derivatives(xi)) * (
        2.0 / h
    )
    p = space.trial_basis.values(t)
    dp = space.trial_basis.derivatives(t)
    value = np.sum(p * spatial, axis=-1)
    dx_ref = np.sum(p * spatial_dx, axis=-1)
    dt_ref = np.sum(dp * spatial, axis=-1)

    _, jac, theta_t = map_on_element(deformation, element, xi, t)
    dx = dx_ref / jac
    return value, dx, dt_ref - theta_t * dx


def eval_discrete(
    coeffs: FloatArray,
    space: SlabSpace,
    deformation: SlabDeformation,
    y: npt.ArrayLike,
    t: npt.ArrayLike,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Evaluate a slab function at deformed points.

    Args:
        coeffs (FloatArray): Coefficients of shape (k_t + 1, n_dofs).
        space (SlabSpace): The space.
        deformation (SlabDeformation): Deformation of the slab.
        y (ArrayLike): Deformed points.
        t (ArrayLike): Times in the slab.

    Returns:
        tuple[FloatArray, FloatArray, FloatArray]: Value, spatial and time
            derivative.
    """
    element, xi = pull_back(deformation, y, t)
    return eval_on_element(coeffs, space, deformation, element, xi, t)
