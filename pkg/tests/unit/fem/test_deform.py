import numpy as np
import pytest

from stfem.exc import DeformationError
from stfem.fem.deform import (
    SlabDeformation,
    build_coefficient_map,
    build_slab_deformation,
    deformation_jump,
    eval_deformation,
    eval_jacobian,
    identity_deformation,
    interpolate_initial,
    invert_at_time,
    invert_on_element,
    map_on_element,
    pull_back,
    require_positive_jacobian,
    transfer_continuous,
    transfer_elementwise,
    transfer_time_derivative,
)
from stfem.fem.dofs import build_dof_table
from stfem.fem.levelset import eval_phih, eval_philin, interpolate_levelset
from stfem.fem.mesh import build_mesh, build_slabs
from stfem.fem.polynomials import lagrange_basis
from stfem.fem.regions import build_regions
from tests.helpers import make_problem


def growing_circle(x, t):
    return np.asarray(x) ** 2 - (0.3 + 0.2 * np.asarray(t)) ** 2


@pytest.fixture
def growing_slabs():
    prob = make_problem(growing_circle)
    mesh = build_mesh(-1.0, 1.0, 8)
    slabs = build_slabs(0.5, 4)
    result = []
    for n in (1, 2):
        ls = interpolate_levelset(prob, mesh, slabs, n, 2, 1)
        regions = build_regions(ls, 1.1, 1.0)
        result.append((ls, regions, build_slab_deformation(ls, regions)))
    return result


def test_only_cut_elements_are_deformed(growing_slabs):
    _, regions, deformation = growing_slabs[0]

    np.testing.assert_array_equal(deformation.active, regions.elems_cut)
    assert np.flatnonzero(deformation.active).tolist() == [2, 5]
    assert not deformation.coeff_maps[:, ~deformation.active].any()


def test_node_is_moved_onto_level_set_of_linear_interpolant(growing_slabs):
    ls, _, deformation = growing_slabs[0]

    for t in (ls.t_lo, ls.t_hi):
        moved = eval_deformation(deformation, 0.375, t)
        assert eval_phih(ls, moved, t) == pytest.approx(eval_philin(ls, 0.375, t), abs=1e-13)


def test_vertices_and_uncut_elements_are_fixed(growing_slabs):
    ls, _, deformation = growing_slabs[0]
    x = np.array([-0.8, 0.0, 0.1, 0.25, 0.5, 0.9])

    np.testing.assert_allclose(eval_deformation(deformation, x, ls.t_hi), x, atol=1e-15)


def test_jacobian_is_positive(growing_slabs):
    ls, _, deformation = growing_slabs[0]
    x = np.linspace(-1.0, 1.0, 41)

    jac, theta_t = eval_jacobian(deformation, x, 0.5 * (ls.t_lo + ls.t_hi))

    assert np.all(jac > 0.5)
    assert np.all(np.abs(theta_t) < 1.0)


def test_inversion(growing_slabs):
    ls, _, deformation = growing_slabs[0]
    x = np.linspace(-0.97, 0.97, 20)
    t = 0.1

    y = eval_deformation(deformation, x, t)

    np.testing.assert_allclose(invert_at_time(deformation, y, t), x, atol=1e-12)
    element, xi = pull_back(deformation, y, t)
    np.testing.assert_array_equal(element, ls.mesh.locate(x))
    np.testing.assert_allclose(ls.mesh.from_reference(element, xi), x, atol=1e-12)


def shifted_deformation(levelset, element, nodal):
    maps = np.zeros_like(levelset.coeff_funcs)
    maps[:, element, :] = nodal
    active = np.zeros(levelset.mesh.n_elements, dtype=bool)
    active[element] = True
    return SlabDeformation(levelset=levelset, coeff_maps=maps, active=active)


def test_inversion_recovers_from_non_positive_jacobian(first_levelset):
    # Theta = x + 0.1 + 0.05 (1 - xi^2) folds at xi = 1.25; y has preimages 0.5 and 2
    nodes = lagrange_basis(2).nodes
    deformation = shifted_deformation(first_levelset, 3, 0.1 + 0.05 * (1.0 - nodes**2))
    y = first_levelset.mesh.from_reference(3, 0.0) + 0.2

    xi = invert_on_element(deformation, 3, y, 0.05)

    assert float(xi) == pytest.approx(0.5, abs=1e-12)
    _, jac, _ = map_on_element(deformation, 3, xi, 0.05)
    assert float(jac) > 0.0


def test_inversion_without_preimage(first_levelset):
    nodes = lagrange_basis(2).nodes
    deformation = shifted_deformation(first_levelset, 3, 0.1 + 0.05 * (1.0 - nodes**2))
    y = first_levelset.mesh.from_reference(3, 0.0) + 0.5

    with pytest.raises(DeformationError) as exc_info:
        invert_on_element(deformation, 3, y, 0.05)

    exc_info.match("No preimage")


def test_inversion_falls_back_when_newton_is_cut_short(growing_slabs):
    _, _, deformation = growing_slabs[0]
    element = np.array([2, 2, 5, 5])
    xi = np.array([-0.5, 0.3, 0.0, 0.5])
    y, _, _ = map_on_element(deformation, element, xi, 0.1)

    result = invert_on_element(deformation, element, y, 0.1, max_iter=1)

    np.testing.assert_allclose(result, xi, atol=1e-10)


def test_deformation_is_continuous_for_equal_cut_sets(growing_slabs):
    (_, _, def_minus), (_, _, def_plus) = growing_slabs

    assert deformation_jump(def_minus, def_plus) < 1e-13


def test_transfer_reproduces_physical_coordinate(growing_slabs):
    (_, _, def_minus), (_, _, def_plus) = growing_slabs
    mesh = def_plus.mesh
    nodes = lagrange_basis(2).nodes
    element = np.broadcast_to(np.arange(mesh.n_elements)[:, None], (mesh.n_elements, 3))
    t_n = def_plus.t_lo

    u_minus, _, _ = map_on_element(def_minus, element, nodes, t_n)
    expected, _, _ = map_on_element(def_plus, element, nodes, t_n)

    np.testing.assert_allclose(
        transfer_elementwise(u_minus, def_minus, def_plus), expected, atol=1e-12
    )


def test_identity_deformation(first_levelset):
    deformation = identity_deformation(first_levelset)

    theta, jac, theta_t = map_on_element(deformation, 3, np.array([-1.0, 0.2]), 0.05)

    np.testing.assert_allclose(theta, first_levelset.mesh.from_reference(3, [-1.0, 0.2]))
    np.testing.assert_array_equal(jac, 1.0)
    np.testing.assert_array_equal(theta_t, 0.0)


def test_transfer_time_derivative_without_motion(moving_interval, coarse_mesh, coarse_slabs):
    def_minus = identity_deformation(
        interpolate_levelset(moving_interval, coarse_mesh, coarse_slabs, 1, 1, 1)
    )
    def_plus = identity_deformation(
        interpolate_levelset(moving_interval, coarse_mesh, coarse_slabs, 2, 1, 1)
    )
    rng = np.random.default_rng(3)
    u = rng.normal(size=(8, 3))
    du = rng.normal(size=(8, 3))

    values, derivs = transfer_time_derivative(u, du, def_minus, def_plus)

    np.testing.assert_allclose(values, u, atol=1e-13)
    np.testing.assert_allclose(derivs, du, atol=1e-13)


def test_transfer_time_derivative_on_moving_deformation():
    # the circle translates, so the node displacements change in time
    prob = make_problem(lambda x, t: (np.asarray(x) - 0.1 * np.asarray(t)) ** 2 - 0.09)
    mesh = build_mesh(-1.0, 1.0, 8)
    slabs = build_slabs(0.5, 4)
    def_minus, def_plus = (
        build_slab_deformation(ls, build_regions(ls, 1.1, 1.0))
        for ls in (interpolate_levelset(prob, mesh, slabs, n, 2, 2) for n in (1, 2))
    )
    element = np.broadcast_to(np.arange(mesh.n_elements)[:, None], (mesh.n_elements, 3))
    nodes = lagrange_basis(2).nodes
    t_n = def_plus.t_lo

    # u(y, t) = (1 + 2 t) y + t is reproduced exactly by the quadratic spaces
    def u(y):
        return (1.0 + 2.0 * t_n) * y + t_n

    def u_t(y):
        return 2.0 * y + 1.0

    y_minus, _, theta_t_minus = map_on_element(def_minus, element, nodes, t_n)
    y_plus, _, theta_t_plus = map_on_element(def_plus, element, nodes, t_n)
    du_minus = u_t(y_minus) + (1.0 + 2.0 * t_n) * theta_t_minus

    values, derivs = transfer_time_derivative(u(y_minus), du_minus, def_minus, def_plus)

    assert np.abs(theta_t_plus).max() > 1e-3
    np.testing.assert_allclose(values, u(y_plus), atol=1e-12)
    np.testing.assert_allclose(
        derivs, u_t(y_plus) + (1.0 + 2.0 * t_n) * theta_t_plus, atol=1e-11
    )


def test_interpolate_initial(moving_interval, first_levelset):
    deformation = identity_deformation(first_levelset)

    values, derivs = interpolate_initial(
        deformation, 2, moving_interval.u0, moving_interval.u0_dt
    )
    nodes = first_levelset.mesh.from_reference(
        np.arange(8)[:, None], lagrange_basis(2).nodes[None, :]
    )

    np.testing.assert_array_equal(values, 0.0)
    np.testing.assert_allclose(derivs, moving_interval.u0_dt(nodes))
    assert interpolate_initial(deformation, 2, moving_interval.u0)[1] is None


def test_no_displacement_root():
    mesh = build_mesh(0.0, 1.0, 1)

    with pytest.raises(DeformationError) as exc_info:
        build_coefficient_map(
            mesh, np.array([[0.0, 5.0, 0.0]]), np.array([0.0, 0.0]), np.array([True])
        )

    exc_info.match("No displacement root")


def test_linear_geometry_has_no_displacement():
    mesh = build_mesh(0.0, 1.0, 2)

    disp = build_coefficient_map(
        mesh, np.array([[-1.0, 1.0], [1.0, 2.0]]), np.array([-1.0, 1.0, 2.0]), np.ones(2, bool)
    )

    np.testing.assert_array_equal(disp, 0.0)


def test_require_positive_jacobian():
    require_positive_jacobian(np.array([]), "nowhere")
    require_positive_jacobian(np.array([0.5, 1.2]), "nodes")

    with pytest.raises(DeformationError) as exc_info:
        require_positive_jacobian(np.array([1.0, -0.1]), "quadrature points")

    exc_info.match("quadrature points")


def test_transfer_continuous_is_conforming(moving_interval, coarse_mesh, coarse_slabs):
    def_minus, def_plus = (
        identity_deformation(
            interpolate_levelset(moving_interval, coarse_mesh, coarse_slabs, n, 1, 1)
        )
        for n in (1, 2)
    )
    dofs = build_dof_table(coarse_mesh, 2)
    nodes = coarse_mesh.from_reference(
        np.arange(8)[:, None], lagrange_basis(2).nodes[None, :]
    )

    result = transfer_continuous(nodes**2, def_minus, def_plus, dofs)

    assert result.shape == (dofs.n_dofs,)
    np.testing.assert_allclose(result, dofs.coordinates**2, atol=1e-13)
