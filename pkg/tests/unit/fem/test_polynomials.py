import numpy as np
import pytest

from numpy.polynomial import Polynomial

from stfem.fem.polynomials import (
    LagrangeBasis,
    gauss_lobatto_points,
    gauss_points_for_exactness,
    gauss_rule_on,
    lagrange_basis,
)


@pytest.mark.parametrize("order", [1, 2, 3, 4, 6])
def test_gauss_lobatto_points(order):
    points = gauss_lobatto_points(order)

    assert points.size == order + 1
    assert points[0] == -1.0
    assert points[-1] == 1.0
    assert np.all(np.diff(points) > 0)
    np.testing.assert_allclose(points, -points[::-1], atol=1e-14)


def test_gauss_lobatto_known_values():
    np.testing.assert_allclose(gauss_lobatto_points(2), [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(
        gauss_lobatto_points(3), [-1.0, -np.sqrt(0.2), np.sqrt(0.2), 1.0], atol=1e-14
    )


def test_gauss_lobatto_points_are_read_only():
    with pytest.raises(ValueError):
        gauss_lobatto_points(3)[0] = 0.0


@pytest.mark.parametrize(("exactness", "n"), [(0, 1), (1, 1), (2, 2), (3, 2), (7, 4), (-1, 1)])
def test_gauss_points_for_exactness(exactness, n):
    assert gauss_points_for_exactness(exactness) == n


@pytest.mark.parametrize("degree", [0, 3, 7, 10])
def test_gauss_rule_on_integrates_polynomials(degree):
    points, weights = gauss_rule_on(0.2, 1.7, degree)
    poly = Polynomial(np.arange(1.0, degree + 2.0))
    exact = poly.integ()(1.7) - poly.integ()(0.2)

    assert np.dot(weights, poly(points)) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("order", [1, 2, 4])
def test_lagrange_basis_is_nodal(order):
    basis = lagrange_basis(order)

    np.testing.assert_allclose(basis.values(basis.nodes), np.eye(order + 1), atol=1e-13)
    np.testing.assert_allclose(basis.values(np.linspace(-1, 1, 7)).sum(axis=-1), 1.0)
    np.testing.assert_allclose(
        basis.derivatives(np.linspace(-1, 1, 7)).sum(axis=-1), 0.0, atol=1e-12
    )


def test_lagrange_basis_reproduces_polynomials():
    basis = lagrange_basis(3)
    poly = Polynomial([0.5, -1.0, 2.0, 0.25])
    xi = np.linspace(-1.5, 1.5, 11)

    nodal = poly(basis.nodes)

    np.testing.assert_allclose(basis.values(xi) @ nodal, poly(xi), atol=1e-12)
    np.testing.assert_allclose(basis.derivatives(xi) @ nodal, poly.deriv()(xi), atol=1e-11)


def test_legendre_coefficients():
    basis = lagrange_basis(2)
    nodal = basis.nodes**2

    coeffs = basis.legendre_coefficients(nodal)

    # x^2 = (P0 + 2 P2) / 3
    np.testing.assert_allclose(coeffs, [1.0 / 3.0, 0.0, 2.0 / 3.0], atol=1e-14)


def test_constant_basis():
    basis = LagrangeBasis(np.array([1.0]))

    assert basis.order == 0
    np.testing.assert_allclose(basis.values(np.array([-0.3, 0.8])), [[1.0], [1.0]])
    np.testing.assert_allclose(basis.derivatives(np.array([0.1])), [[0.0]])
