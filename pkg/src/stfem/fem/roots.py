#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Real roots and extrema of polynomials on a closed interval.

Degrees up to two are solved in closed form. Higher degrees are bracketed on
Chebyshev samples refined by Brent's method, with the critical points found
recursively from the derivative so that tangential roots are not missed.
"""

from __future__ import annotations

import math
import typing as t

import numpy as np

from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from stfem.const import CHEBYSHEV_FACTOR, ROOT_TOLERANCE


if t.TYPE_CHECKING:
    from .polynomials import FloatArray


_ZERO_COEFF = 1e-14


def effective_degree(poly: Polynomial) -> int:
    """Degree after dropping leading coefficients that vanish numerically.

    Args:
        poly (Polynomial): Polynomial in the power basis.

    Returns:
        int: The effective degree, -1 for the zero polynomial.
    """
    coef = np.asarray(poly.coef, dtype=np.float64)
    scale = np.max(np.abs(coef)) if coef.size else 0.0
    if scale == 0.0:
        return -1
    nonzero = np.nonzero(np.abs(coef) > _ZERO_COEFF * scale)[0]
    return int(nonzero[-1])


def real_roots(
    poly: Polynomial,
    lo: float = -1.0,
    hi: float = 1.0,
    *,
    tol: float = ROOT_TOLERANCE,
    samples_per_degree: int = CHEBYSHEV_FACTOR,
) -> FloatArray:
    """Real roots of a polynomial in [lo, hi], tangential roots included.

    Args:
        poly (Polynomial): Polynomial in the power basis.
        lo (float): Left end of the search interval.
        hi (float): Right end of the search interval.
        tol (float): Absolute tolerance of the root refinement.
        samples_per_degree (int): Chebyshev bracketing samples per degree.

    Returns:
        FloatArray: Sorted roots in [lo, hi] with duplicates removed.
    """
    degree = effective_degree(poly)
    if degree <= 0:
        return np.empty(0)

    coef = np.asarray(poly.coef[: degree + 1], dtype=np.float64)
    trimmed = Polynomial(coef)
    if degree <= 2:  # noqa: PLR2004
        candidates = _closed_form_roots(coef)
    else:
        candidates = _bracketed_roots(trimmed, lo, hi, tol, samples_per_degree)

    roots = [min(max(r, lo), hi) for r in candidates if lo - tol <= r <= hi + tol]
    return _unique_sorted(roots, tol)


def _closed_form_roots(coef: FloatArray) -> list[float]:
    if len(coef) == 2:  # noqa: PLR2004
        return [-coef[0] / coef[1]]

    c, b, a = coef
    disc = b * b - 4.0 * a * c
    scale = b * b + abs(4.0 * a * c)
    if disc < 0.0:
        if disc >= -_ZERO_COEFF * scale:
            return [-b / (2.0 * a)]
        return []

    # cancellation free quadratic formula
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = [q / a]
    if q != 0.0:
        roots.append(c / q)
    return roots


def _bracketed_roots(
    poly: Polynomial, lo: float, hi: float, tol: float, samples_per_degree: int
) -> list[float]:
    degree = effective_degree(poly)
    critical = real_roots(
        poly.deriv(), lo, hi, tol=tol, samples_per_degree=samples_per_degree
    )

    n_samples = samples_per_degree * degree
    k = np.arange(n_samples)
    cheb = np.cos((2 * k + 1) * np.pi / (2 * n_samples))
    samples = 0.5 * (lo + hi) + 0.5 * (hi - lo) * cheb
    grid = np.unique(np.concatenate(([lo, hi], samples, critical)))
    values = poly(grid)

    scale = float(np.max(np.abs(poly.coef)))
    roots = [float(x) for x, v in zip(grid, values, strict=True) if v == 0.0]
    roots.extend(
        float(c) for c in critical if abs(poly(c)) <= 1e2 * tol * scale
    )
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:], strict=True):
        if fa * fb < 0.0:
            roots.append(brentq(poly, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
    return roots


def _unique_sorted(roots: list[float], tol: float) -> FloatArray:
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return np.array(merged, dtype=np.float64)


def extrema(poly: Polynomial, lo: float = -1.0, hi: float = 1.0) -> tuple[float, float]:
    """Minimum and maximum of a polynomial on [lo, hi].

    Args:
        poly (Polynomial): Polynomial in the power basis.
        lo (float): Left end of the interval.
        hi (float): Right end of the interval.

    Returns:
        tuple[float, float]: The minimum and the maximum.
    """
    points = np.concatenate(([lo, hi], real_roots(poly.deriv(), lo, hi)))
    values = poly(points)
    return float(np.min(values)), float(np.max(values))
