#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Element and facet classification of a slab.

All sets are decided from phi^lin. On an element phi^lin is linear in x, so
its range over the prism T x I_n is spanned by the two vertex trajectories,
each a polynomial of degree q_t in time.
"""

from __future__ import annotations

import typing as t

from dataclasses import dataclass, field

import numpy as np

from stfem.const import SIGN_TOLERANCE
from stfem.exc import GeometryError
from stfem.logger import logger
from stfem.messages import W

from .roots import extrema


if t.TYPE_CHECKING:
    from .levelset import LevelSetSlab
    from .mesh import BoolArray, IntArray


@dataclass(frozen=True, eq=False)
class ActiveRegions:
    """Discrete regions of one slab.

    Element sets are boolean masks over the background elements. Facet sets
    are sorted interior vertex indices; facet ``f`` separates the elements
    ``f - 1`` and ``f``.
    """

    slab_index: int

    elems_e: BoolArray = field(repr=False)
    """Elements where phi^lin is negative somewhere in the slab."""

    elems_i: BoolArray = field(repr=False)
    """Elements where phi^lin is negative everywhere in the slab."""

    elems_cut: BoolArray = field(repr=False)
    """Elements cut during the slab, E minus I."""

    elems_eplus: BoolArray = field(repr=False)
    """Elements meeting {phi^lin(., t_n) < delta}."""

    elems_s: BoolArray = field(repr=False)
    """Elements meeting the strip {|phi^lin(., t_n)| < delta}."""

    facets_r: IntArray = field(repr=False)
    facets_rext: IntArray = field(repr=False)
    facets_rplus: IntArray = field(repr=False)

    delta: float
    """Half width of the strip."""

    @property
    def n_cut(self) -> int:
        """Number of cut elements."""
        return int(np.count_nonzero(self.elems_cut))


def classify_elements(
    ls: LevelSetSlab,
    n_time_samples: int | None = None,
    *,
    sign_tolerance: float = SIGN_TOLERANCE,
) -> tuple[BoolArray, BoolArray, BoolArray]:
    """Classify the elements of a slab into extended, interior and cut.

    Extremal values over the slab come from the critical points of the
    vertex trajectories; sampled values at Chebyshev times only cross-check
    them. A sampled value below the computed minimum is reported and the
    smaller value is used.

    Args:
        ls (LevelSetSlab): The level set.
        n_time_samples (int | None): Number of cross-check times, at least
            ``q_t + 2``. Defaults to ``q_t + 2``.
        sign_tolerance (float): Tie tolerance relative to the domain length.

    Returns:
        tuple[BoolArray, BoolArray, BoolArray]: Masks of E, I and E minus I.

    Raises:
        GeometryError: If too few time samples are requested.
    """
    if n_time_samples is None:
        n_time_samples = ls.q_t + 2
    if n_time_samples < ls.q_t + 2:
        error = (
            f"At least {ls.q_t + 2} time samples are needed, got {n_time_samples}."
        )
        raise GeometryError(error)

    tol = sign_tolerance * ls.mesh.length
    n_vertices = ls.mesh.n_vertices
    vmin = np.empty(n_vertices)
    vmax = np.empty(n_vertices)
    for v in range(n_vertices):
        vmin[v], vmax[v] = extrema(ls.vertex_trajectory(v))

    k = np.arange(n_time_samples)
    tau = np.cos((2 * k + 1) * np.pi / (2 * n_time_samples))
    sampled = ls.temporal_basis.values(tau) @ ls.lin_coeff_funcs
    smin = sampled.min(axis=0)
    smax = sampled.max(axis=0)

    gap = vmin - smin
    scale = max(float(np.max(np.abs(ls.lin_coeff_funcs))), 1.0)
    for v in np.nonzero(gap > 1e3 * np.finfo(float).eps * scale)[0]:
        element = min(int(v), ls.mesh.n_elements - 1)
        logger.warning(
            W.TANGENTIAL_SAMPLE_MISMATCH, {"element": element, "gap": gap[v]}
        )
    vmin = np.minimum(vmin, smin)
    vmax = np.maximum(vmax, smax)

    emin = np.minimum(vmin[:-1], vmin[1:])
    emax = np.maximum(vmax[:-1], vmax[1:])
    elems_e = emin < -tol
    elems_i = elems_e & (emax <= tol)
    return elems_e, elems_i, elems_e & ~elems_i


def extended_region(
    ls: LevelSetSlab,
    eps_f: float,
    w_inf: float,
    *,
    sign_tolerance: float = SIGN_TOLERANCE,
) -> tuple[BoolArray, BoolArray, float]:
    """Extension region and strip of the continuous-in-time methods.

    Both sets only depend on phi^lin at the slab end time t_n.

    Args:
        ls (LevelSetSlab): The level set.
        eps_f (float): Extension factor, at least 1.
        w_inf (float): Bound of the velocity magnitude.
        sign_tolerance (float): Tie tolerance relative to the domain length.

    Returns:
        tuple[BoolArray, BoolArray, float]: Masks of E+ and S, and delta.

    Raises:
        GeometryError: If the extension factor is below 1.
    """
    if eps_f < 1.0:
        error = f"Extension factor must be at least 1, got {eps_f}."
        raise GeometryError(error)

    tol = sign_tolerance * ls.mesh.length
    delta = eps_f * ls.dt * w_inf
    values = ls.vertex_values(ls.t_hi)
    lo = np.minimum(values[:-1], values[1:])
    hi = np.maximum(values[:-1], values[1:])
    elems_eplus = lo < delta - tol
    elems_s = (lo <= delta + tol) & (hi >= -delta - tol)
    return elems_eplus, elems_s, delta


def check_extension_constraint(
    regions: ActiveRegions, elems_e_next: BoolArray | None = None
) -> bool:
    """Check that the extension region covers the active elements.

    Args:
        regions (ActiveRegions): Regions of slab n.
        elems_e_next (BoolArray | None): E of slab n + 1, if any.

    Returns:
        bool: True if E(n) and E(n + 1) are subsets of E+(n).
    """
    covered = bool(np.all(regions.elems_eplus[regions.elems_e]))
    if elems_e_next is not None:
        covered = covered and bool(
            np.all(regions.elems_eplus[np.asarray(elems_e_next, dtype=bool)])
        )
    return covered


def facet_sets(
    elems_e: BoolArray,
    elems_i: BoolArray,
    elems_eplus: BoolArray,
    elems_s: BoolArray,
) -> tuple[IntArray, IntArray, IntArray]:
    """Ghost penalty facets of a slab.

    F_R holds the facets between a cut element and an element of E. F_R,ext
    grows F_R into the interior: every maximal chain of cut elements adds
    facets between two interior elements next to it, alternating sides,
    until as many facets as the chain has elements were added or no
    interior facet is left on either side. F_R+ holds the facets between
    an element of E+ and a strip element.

    Args:
        elems_e (BoolArray): Mask of E.
        elems_i (BoolArray): Mask of I.
        elems_eplus (BoolArray): Mask of E+.
        elems_s (BoolArray): Mask of S.

    Returns:
        tuple[IntArray, IntArray, IntArray]: F_R, F_R,ext and F_R+.
    """
    cut = elems_e & ~elems_i
    left, right = cut[:-1], cut[1:]
    r_mask = (left & elems_e[1:]) | (right & elems_e[:-1])
    plus_mask = (elems_eplus[:-1] & elems_s[1:]) | (elems_eplus[1:] & elems_s[:-1])
    facets_r = np.nonzero(r_mask)[0] + 1
    facets_rplus = np.nonzero(plus_mask)[0] + 1

    grown = set(facets_r.tolist())
    for start, stop in _chains(cut):
        grown.update(_grow_chain(elems_i, start, stop))

    facets_rext = np.array(sorted(grown), dtype=np.intp)
    return facets_r.astype(np.intp), facets_rext, facets_rplus.astype(np.intp)


def _chains(mask: BoolArray) -> list[tuple[int, int]]:
    """Maximal runs of True as (first, last) element pairs."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0] - 1
    return list(zip(starts.tolist(), stops.tolist(), strict=True))


def _grow_chain(elems_i: BoolArray, start: int, stop: int) -> list[int]:
    n_el = len(elems_i)
    budget = stop - start + 1
    added: list[int] = []
    # next element to pair on each side
    lo, hi = start - 1, stop + 1
    left_open = right_open = True
    while budget > 0 and (left_open or right_open):
        if left_open:
            if lo >= 1 and elems_i[lo] and elems_i[lo - 1]:
                added.append(lo)
                lo -= 1
                budget -= 1
            else:
                left_open = False
        if budget > 0 and right_open:
            if hi + 1 < n_el and elems_i[hi] and elems_i[hi + 1]:
                added.append(hi + 1)
                hi += 1
                budget -= 1
            else:
                right_open = False
    return added


def build_regions(
    ls: LevelSetSlab,
    eps_f: float,
    w_inf: float,
    *,
    n_time_samples: int | None = None,
    sign_tolerance: float = SIGN_TOLERANCE,
) -> ActiveRegions:
    """Compute all regions and facet sets of a slab.

    Args:
        ls (LevelSetSlab): The level set.
        eps_f (float): Extension factor, at least 1.
        w_inf (float): Bound of the velocity magnitude.
        n_time_samples (int | None): Cross-check times of the classification.
        sign_tolerance (float): Tie tolerance relative to the domain length.

    Returns:
        ActiveRegions: The regions.
    """
    elems_e, elems_i, elems_cut = classify_elements(
        ls, n_time_samples, sign_tolerance=sign_tolerance
    )
    elems_eplus, elems_s, delta = extended_region(
        ls, eps_f, w_inf, sign_tolerance=sign_tolerance
    )
    facets_r, facets_rext, facets_rplus = facet_sets(
        elems_e, elems_i, elems_eplus, elems_s
    )
    for mask in (elems_e, elems_i, elems_cut, elems_eplus, elems_s):
        mask.setflags(write=False)
    return ActiveRegions(
        slab_index=ls.slab_index,
        elems_e=elems_e,
        elems_i=elems_i,
        elems_cut=elems_cut,
        elems_eplus=elems_eplus,
        elems_s=elems_s,
        facets_r=facets_r,
        facets_rext=facets_rext,
        facets_rplus=facets_rplus,
        delta=delta,
    )
