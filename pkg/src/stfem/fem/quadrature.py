#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Quadrature on cut elements and cut space-time prisms.

Rules are built on the undeformed reference geometry {phi^lin < 0}, which
is an interval at every fixed time. Deformed rules multiply the weights by
the Jacobian of the slab deformation.
"""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from stfem.const import MERGE_TOLERANCE, ROOT_TOLERANCE, SUBDOMAINS, TIME_RULES
from stfem.exc import QuadratureError

from .deform import map_on_element, require_positive_jacobian
from .polynomials import gauss_rule, gauss_points_for_exactness, gauss_rule_on
from .roots import real_roots


if t.TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

    from .deform import SlabDeformation
    from .levelset import LevelSetSlab
    from .polynomials import FloatArray


class SpatialRule(t.NamedTuple):
    """Quadrature rule on a part of one element at a fixed time."""

    points: FloatArray
    weights: FloatArray


class DeformedRule(t.NamedTuple):
    """Fixed-time rule on the deformed domain of one element."""

    xi: FloatArray
    """Reference coordinates of the points."""

    y: FloatArray
    """Deformed coordinates of the points."""

    weights: FloatArray
    """Weights including the deformation Jacobian."""


@dataclass(frozen=True, eq=False)
class SpaceTimeQuadRule:
    """Quadrature rule on the cut prism of one element and one slab."""

    element: int
    x: FloatArray = field(repr=False)
    """Undeformed coordinates of the points."""

    t: FloatArray = field(repr=False)
    """Times of the points."""

    weights: FloatArray = field(repr=False)
    breakpoints: FloatArray
    """Time subdivision used, empty for the topology-insensitive rule."""

    orders: tuple[int, int]
    """Spatial and temporal exactness degrees."""

    @property
    def size(self) -> int:
        """Number of points."""
        return len(self.weights)


@dataclass(frozen=True)
class QuadratureOptions:
    """Selection of the space-time rule used in the slab forms."""

    mode: TIME_RULES = TIME_RULES.PRESERVE
    substeps: int = 1
    """Equal subintervals of the topology-insensitive rule."""

    order_factor: int = 1
    """Multiplier of the temporal exactness 2 (k_t + 1) per subinterval."""

    spatial_order: int | None = None
    """Spatial exactness; None selects 2 k_s + q_s."""

    merge_tolerance: float = MERGE_TOLERANCE
    root_tolerance: float = ROOT_TOLERANCE


def _cut_intervals(
    ls: LevelSetSlab,
    element: int,
    times: FloatArray,
    domain: SUBDOMAINS,
) -> tuple[FloatArray, FloatArray]:
    """End points of the selected part of an element at several times."""
    x_left, x_right = ls.mesh.vertices[element], ls.mesh.vertices[element + 1]
    lo = np.full(times.shape, x_left)
    hi = np.full(times.shape, x_right)
    if domain is SUBDOMAINS.FULL:
        return lo, hi

    temporal = ls.temporal_values(times)
    a = temporal @ ls.lin_coeff_funcs[:, element]
    b = temporal @ ls.lin_coeff_funcs[:, element + 1]
    inside_left = a < 0.0
    inside_right = b < 0.0
    if domain is SUBDOMAINS.OUTSIDE:
        inside_left, inside_right = ~inside_left, ~inside_right

    changes = inside_left != inside_right
    with np.errstate(divide="ignore", invalid="ignore"):
        root = x_left + np.where(changes, a / (a - b), 0.0) * ls.mesh.h
    lo = np.where(changes & inside_right, root, lo)
    hi = np.where(changes & inside_left, root, hi)
    empty = ~inside_left & ~inside_right
    hi = np.where(empty, lo, hi)
    return lo, hi


def spatial_cut_rule(
    ls: LevelSetSlab,
    element: int,
    t: float,
    order: int,
    domain: SUBDOMAINS = SUBDOMAINS.INSIDE,
) -> SpatialRule:
    """Gauss rule on the part of an element where phi^lin(., t) is negative.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        t (float): Time in the slab.
        order (int): Polynomial exactness degree.
        domain (SUBDOMAINS): Inside part, outside part or the full element.

    Returns:
        SpatialRule: Points and weights, empty if the part has no length.
    """
    lo, hi = _cut_intervals(ls, element, np.array([t], dtype=np.float64), domain)
    if not hi[0] > lo[0]:
        return SpatialRule(np.empty(0), np.empty(0))
    points, weights = gauss_rule_on(float(lo[0]), float(hi[0]), order)
    return SpatialRule(points, weights)


def time_breakpoints(
    ls: LevelSetSlab,
    element: int,
    *,
    merge_tolerance: float = MERGE_TOLERANCE,
    root_tolerance: float = ROOT_TOLERANCE,
) -> FloatArray:
    """Subdivision of the slab at sign changes of the vertex trajectories.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        merge_tolerance (float): Merge distance relative to the slab length.
        root_tolerance (float): Root tolerance on the reference interval.

    Returns:
        FloatArray: Increasing times from t_{n-1} to t_n.
    """
    roots = [
        real_roots(ls.vertex_trajectory(v), tol=root_tolerance)
        for v in (element, element + 1)
    ]
    candidates = np.sort(ls.reference_to_time(np.concatenate(roots)))
    tol = merge_tolerance * ls.dt
    merged = [ls.t_lo]
    for c in candidates:
        if c - merged[-1] > tol and ls.t_hi - c > tol:
            merged.append(float(c))
    merged.append(ls.t_hi)
    return np.array(merged)


def _tensor_rule(
    ls: LevelSetSlab,
    element: int,
    intervals: FloatArray,
    temporal_order: int,
    spatial_order: int,
    domain: SUBDOMAINS,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    times = []
    time_weights = []
    for a, b in zip(intervals[:-1], intervals[1:], strict=True):
        tq, tw = gauss_rule_on(float(a), float(b), temporal_order)
        times.append(tq)
        time_weights.append(tw)
    tq = np.concatenate(times)
    tw = np.concatenate(time_weights)

    lo, hi = _cut_intervals(ls, element, tq, domain)
    ref, ref_w = gauss_rule(gauss_points_for_exactness(spatial_order))
    half = 0.5 * (hi - lo)
    x = lo[:, None] + half[:, None] * (ref[None, :] + 1.0)
    w = (tw * half)[:, None] * ref_w[None, :]
    tt = np.broadcast_to(tq[:, None], x.shape)
    keep = np.broadcast_to((half > 0.0)[:, None], x.shape)
    return x[keep], tt[keep], w[keep]


def _checked(rule: SpaceTimeQuadRule) -> SpaceTimeQuadRule:
    if rule.size and not np.all(rule.weights > 0.0):
        error = f"Non-positive quadrature weight on element {rule.element}."
        raise QuadratureError(error)
    return rule


def st_rule_topology_preserving(
    ls: LevelSetSlab,
    element: int,
    k_t: int,
    spatial_order: int,
    *,
    temporal_order: int | None = None,
    domain: SUBDOMAINS = SUBDOMAINS.INSIDE,
    merge_tolerance: float = MERGE_TOLERANCE,
    root_tolerance: float = ROOT_TOLERANCE,
) -> SpaceTimeQuadRule:
    """Space-time rule splitting the slab where the cut topology changes.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        k_t (int): Temporal order of the discretisation.
        spatial_order (int): Spatial exactness degree.
        temporal_order (int | None): Temporal exactness per subinterval.
            Defaults to 2 (k_t + 1).
        domain (SUBDOMAINS): Part of the prism to integrate over.
        merge_tolerance (float): Breakpoint merge distance relative to dt.
        root_tolerance (float): Root tolerance on the reference interval.

    Returns:
        SpaceTimeQuadRule: The rule.

    Raises:
        QuadratureError: If a weight is not positive.
    """
    if temporal_order is None:
        temporal_order = 2 * (k_t + 1)
    breakpoints = time_breakpoints(
        ls, element, merge_tolerance=merge_tolerance, root_tolerance=root_tolerance
    )
    x, tt, w = _tensor_rule(
        ls, element, breakpoints, temporal_order, spatial_order, domain
    )
    return _checked(
        SpaceTimeQuadRule(
            element=element,
            x=x,
            t=tt,
            weights=w,
            breakpoints=breakpoints,
            orders=(spatial_order, temporal_order),
        )
    )


def st_rule_topology_insensitive(
    ls: LevelSetSlab,
    element: int,
    k_t: int,
    spatial_order: int,
    substeps: int = 1,
    order_factor: int = 1,
    *,
    domain: SUBDOMAINS = SUBDOMAINS.INSIDE,
) -> SpaceTimeQuadRule:
    """Space-time rule on equal subintervals that ignores topology changes.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        k_t (int): Temporal order of the discretisation.
        spatial_order (int): Spatial exactness degree.
        substeps (int): Number of equal subintervals.
        order_factor (int): Multiplier of the temporal exactness 2 (k_t + 1).
        domain (SUBDOMAINS): Part of the prism to integrate over.

    Returns:
        SpaceTimeQuadRule: The rule.

    Raises:
        QuadratureError: If a weight is not positive or the substeps or
            order factor are below 1.
    """
    if substeps < 1 or order_factor < 1:
        error = f"Invalid substeps {substeps} or order factor {order_factor}."
        raise QuadratureError(error)
    temporal_order = order_factor * 2 * (k_t + 1)
    intervals = np.linspace(ls.t_lo, ls.t_hi, substeps + 1)
    intervals[-1] = ls.t_hi
    x, tt, w = _tensor_rule(
        ls, element, intervals, temporal_order, spatial_order, domain
    )
    return _checked(
        SpaceTimeQuadRule(
            element=element,
            x=x,
            t=tt,
            weights=w,
            breakpoints=np.empty(0),
            orders=(spatial_order, temporal_order),
        )
    )


def space_time_rule(
    ls: LevelSetSlab,
    element: int,
    k_t: int,
    spatial_order: int,
    options: QuadratureOptions,
) -> SpaceTimeQuadRule:
    """Space-time rule selected by the quadrature options.

    Args:
        ls (LevelSetSlab): The level set.
        element (int): Element index.
        k_t (int): Temporal order of the discretisation.
        spatial_order (int): Spatial exactness degree.
        options (QuadratureOptions): Rule selection.

    Returns:
        SpaceTimeQuadRule: The rule.
    """
    if options.mode is TIME_RULES.INSENSITIVE:
        return st_rule_topology_insensitive(
            ls, element, k_t, spatial_order, options.substeps, options.order_factor
        )
    return st_rule_topology_preserving(
        ls,
        element,
        k_t,
        spatial_order,
        temporal_order=options.order_factor * 2 * (k_t + 1),
        merge_tolerance=options.merge_tolerance,
        root_tolerance=options.root_tolerance,
    )


def fixed_time_cut_rule(
    deformation: SlabDeformation,
    element: int,
    t: float,
    order: int,
    domain: SUBDOMAINS = SUBDOMAINS.INSIDE,
) -> DeformedRule:
    """Rule on the deformed domain Omega^h(t) restricted to one element.

    Args:
        deformation (SlabDeformation): The deformation.
        element (int): Element index.
        t (float): Time in the slab.
        order (int): Spatial exactness degree on the reference geometry.
        domain (SUBDOMAINS): Inside part, outside part or the full element.

    Returns:
        DeformedRule: Reference points, deformed points and weights.

    Raises:
        DeformationError: If the Jacobian is not positive.
    """
    mesh = deformation.mesh
    rule = spatial_cut_rule(deformation.levelset, element, t, order, domain)
    xi = mesh.to_reference(element, rule.points)
    y, jac, _ = map_on_element(deformation, element, xi, t)
    require_positive_jacobian(jac, f"element {element}, t={t:.6g}")
    return DeformedRule(xi=xi, y=y, weights=rule.weights * jac)


def integrate_deformed(
    deformation: SlabDeformation,
    func: Callable[[FloatArray], npt.ArrayLike],
    t: float,
    order: int,
) -> float:
    """Integrate a function of the deformed coordinate over Omega^h(t).

    Args:
        deformation (SlabDeformation): The deformation.
        func (Callable): Vectorised integrand.
        t (float): Time in the slab.
        order (int): Spatial exactness degree on the reference geometry.

    Returns:
        float: The integral.
    """
    total = 0.0
    for element in range(deformation.mesh.n_elements):
        rule = fixed_time_cut_rule(deformation, element, t, order)
        if rule.weights.size:
            total += float(np.sum(rule.weights * np.asarray(func(rule.y))))
    return total
