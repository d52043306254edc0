#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Lagrange bases and Gauss rules on the reference interval [-1, 1]."""

from __future__ import annotations

import typing as t

from functools import cache

import numpy as np

from numpy.polynomial import legendre
from scipy.special import roots_jacobi


if t.TYPE_CHECKING:
    import numpy.typing as npt


type FloatArray = npt.NDArray[np.float64]
"""Array of double precision values."""


def _frozen(array: FloatArray) -> FloatArray:
    array.setflags(write=False)
    return array


@cache
def gauss_lobatto_points(order: int) -> FloatArray:
    """Gauss-Lobatto points of a polynomial order on [-1, 1].

    The order-0 "rule" is the single right end point, so that the constant
    basis function is associated with the upper end of an interval.

    Args:
        order (int): Polynomial order; the rule has ``order + 1`` points.

    Returns:
        FloatArray: Increasing points including both end points.

    Raises:
        ValueError: If the order is negative.
    """
    if order < 0:
        error = f"Gauss-Lobatto order must be non-negative, got {order}."
        raise ValueError(error)
    if order == 0:
        return _frozen(np.array([1.0]))
    if order == 1:
        return _frozen(np.array([-1.0, 1.0]))

    # interior points are the roots of P^(1,1)_{order-1}
    interior, _ = roots_jacobi(order - 1, 1.0, 1.0)
    return _frozen(np.concatenate(([-1.0], np.sort(interior), [1.0])))


@cache
def gauss_rule(n_points: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre rule on [-1, 1].

    Args:
        n_points (int): Number of points.

    Returns:
        tuple[FloatArray, FloatArray]: Points and weights.
    """
    points, weights = legendre.leggauss(n_points)
    return _frozen(points), _frozen(weights)


def gauss_points_for_exactness(degree: int) -> int:
    """Number of Gauss points integrating polynomials of a degree exactly.

    Args:
        degree (int): Polynomial degree to integrate exactly.

    Returns:
        int: Smallest n with 2n - 1 >= degree.
    """
    return max(degree, 0) // 2 + 1


def gauss_rule_on(
    lo: float, hi: float, exactness: int
) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre rule mapped to an interval.

    Args:
        lo (float): Left end of the interval.
        hi (float): Right end of the interval.
        exactness (int): Polynomial degree integrated exactly.

    Returns:
        tuple[FloatArray, FloatArray]: Points and weights on [lo, hi].
    """
    ref_points, ref_weights = gauss_rule(gauss_points_for_exactness(exactness))
    half = 0.5 * (hi - lo)
    return lo + half * (ref_points + 1.0), half * ref_weights


class LagrangeBasis:
    """Lagrange basis on given nodes of the reference interval.

    The basis is stored by its Legendre coefficients, which keeps evaluation
    well conditioned and allows evaluation outside [-1, 1] for polynomial
    extensions.
    """

    def __init__(self, nodes: FloatArray) -> None:
        """Initialize the basis.

        Args:
            nodes (FloatArray): Distinct interpolation nodes.
        """
        self.nodes = np.asarray(nodes, dtype=np.float64)
        self.order = len(self.nodes) - 1
        vander = legendre.legvander(self.nodes, self.order)
        # column j holds the Legendre coefficients of basis function j
        self._coeffs = np.linalg.inv(vander)
        self._dcoeffs = legendre.legder(self._coeffs, axis=0)

    @property
    def size(self) -> int:
        """Number of basis functions."""
        return self.order + 1

    def values(self, xi: npt.ArrayLike) -> FloatArray:
        """Evaluate all basis functions.

        Args:
            xi (ArrayLike): Reference points of any shape.

        Returns:
            FloatArray: Values with a trailing axis over the basis.
        """
        return legendre.legvander(np.asarray(xi, dtype=np.float64), self.order) @ (
            self._coeffs
        )

    def derivatives(self, xi: npt.ArrayLike) -> FloatArray:
        """Evaluate the reference derivatives of all basis functions.

        Args:
            xi (ArrayLike): Reference points of any shape.

        Returns:
            FloatArray: Derivatives with a trailing axis over the basis.
        """
        xi = np.asarray(xi, dtype=np.float64)
        if self.order == 0:
            return np.zeros((*xi.shape, 1))
        return legendre.legvander(xi, self.order - 1) @ self._dcoeffs

    def legendre_coefficients(self, nodal: FloatArray) -> FloatArray:
        """Legendre coefficients of the interpolant of nodal values.

        Args:
            nodal (FloatArray): Values at the nodes.

        Returns:
            FloatArray: Legendre series coefficients.
        """
        return self._coeffs @ nodal


@cache
def lagrange_basis(order: int) -> LagrangeBasis:
    """Lagrange basis on the Gauss-Lobatto points of an order.

    Args:
        order (int): Polynomial order.

    Returns:
        LagrangeBasis: The shared basis instance.
    """
    return LagrangeBasis(gauss_lobatto_points(order))
