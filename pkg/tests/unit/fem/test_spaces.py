from dataclasses import replace

import numpy as np
import pytest

from stfem.const import METHODS, TEMPORAL_KINDS
from stfem.exc import SpaceError
from stfem.fem.deform import identity_deformation
from stfem.fem.dofs import build_dof_table
from stfem.fem.levelset import interpolate_levelset
from stfem.fem.mesh import build_mesh, build_slabs
from stfem.fem.regions import ActiveRegions
from stfem.fem.spaces import build_slab_space, build_temporal_basis, eval_discrete, eval_on_element
from tests.helpers import make_problem


def mask(n, members):
    result = np.zeros(n, dtype=bool)
    result[list(members)] = True
    return result


@pytest.fixture
def regions():
    empty = np.empty(0, dtype=np.intp)
    return ActiveRegions(
        slab_index=1,
        elems_e=mask(6, range(4)),
        elems_i=mask(6, range(3)),
        elems_cut=mask(6, [3]),
        elems_eplus=mask(6, range(5)),
        elems_s=mask(6, [3, 4]),
        facets_r=empty,
        facets_rext=empty,
        facets_rplus=empty,
        delta=0.1,
    )


@pytest.fixture
def dofs():
    return build_dof_table(build_mesh(0.0, 1.0, 6), 1)


def test_hermite_basis_end_values():
    basis = build_temporal_basis(TEMPORAL_KINDS.HERMITE, 3, 0.5, 0.75)

    np.testing.assert_allclose(basis.values(0.5), [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.values(0.75), [0.0, 0.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.derivatives(0.5), [0.0, 1.0, 0.0, 0.0], atol=1e-13)
    np.testing.assert_allclose(basis.derivatives(0.75), [0.0, 0.0, 0.0, 1.0], atol=1e-13)
    assert (basis.lower_index, basis.slope_index, basis.upper_index) == (0, 1, 2)


def test_hermite_basis_reproduces_cubics():
    basis = build_temporal_basis(TEMPORAL_KINDS.HERMITE, 3, 0.5, 0.75)
    times = np.linspace(0.5, 0.75, 7)

    def cubic(t):
        return 2.0 - t + 3.0 * t**3

    def slope(t):
        return -1.0 + 9.0 * t**2

    coeffs = np.array([cubic(0.5), slope(0.5), cubic(0.75), slope(0.75)])

    np.testing.assert_allclose(basis.values(times) @ coeffs, cubic(times), atol=1e-13)
    np.testing.assert_allclose(basis.derivatives(times) @ coeffs, slope(times), atol=1e-12)


def test_lagrange_basis_on_slab():
    basis = build_temporal_basis(TEMPORAL_KINDS.LAGRANGE, 2, 0.0, 0.5)

    np.testing.assert_allclose(basis.values(0.25), [0.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.derivatives(0.1).sum(), 0.0, atol=1e-12)
    assert (basis.lower_index, basis.upper_index, basis.slope_index) == (0, 2, None)

    constant = build_temporal_basis(TEMPORAL_KINDS.LAGRANGE, 0, 0.0, 0.5)
    assert constant.lower_index is None
    assert constant.upper_index == 0


@pytest.mark.parametrize(("kind", "order"), [(TEMPORAL_KINDS.HERMITE, 2), (TEMPORAL_KINDS.LAGRANGE, -1)])
def test_temporal_basis_rejects_order(kind, order):
    with pytest.raises(SpaceError):
        build_temporal_basis(kind, order, 0.0, 1.0)


@pytest.mark.parametrize(
    ("method", "k_t", "n_trial", "constrained_layers", "tags"),
    [
        (METHODS.DG, 1, 10, (), ("E", "E")),
        (METHODS.CG, 1, 6, (0,), ("init", "E+")),
        (METHODS.CG, 2, 11, (0,), ("init", "E", "E+")),
        (METHODS.CGBOX, 2, 12, (0,), ("init", "E+", "E+")),
        (METHODS.GCC, 3, 12, (0, 1), ("init", "init", "E+", "E+")),
    ],
)
def test_slab_space_layout(regions, dofs, method, k_t, n_trial, constrained_layers, tags):
    space = build_slab_space(method, 1, k_t, regions, dofs, 0.0, 0.125)

    assert space.n_trial == n_trial
    assert space.n_test == n_trial
    assert space.constrained_layers == constrained_layers
    assert space.trial_regions == tags
    assert space.dof_map.shape == (n_trial, 2)


def test_gcc_collocation_block(regions, dofs):
    space = build_slab_space(METHODS.GCC, 1, 3, regions, dofs, 0.0, 0.125)

    assert space.collocation_times == (0.125,)
    assert sorted(space.collocation_index[space.collocation_index >= 0].tolist()) == list(
        range(6, 12)
    )
    assert space.test_basis.order == 0


def test_dg_dof_map_is_layer_major(regions, dofs):
    space = build_slab_space(METHODS.DG, 1, 1, regions, dofs, 0.0, 0.125)

    np.testing.assert_array_equal(space.dof_map[:5], [[d, 0] for d in range(5)])
    np.testing.assert_array_equal(space.dof_map[5:], [[d, 1] for d in range(5)])


def test_reconstruct_uses_initial_data(regions, dofs):
    space = build_slab_space(METHODS.CG, 1, 1, regions, dofs, 0.0, 0.125)
    initial = np.full((2, dofs.n_dofs), 7.0)

    coeffs = space.reconstruct(np.arange(6.0), initial)

    np.testing.assert_array_equal(coeffs[0], [7.0, 7.0, 7.0, 7.0, 7.0, 0.0, 0.0])
    np.testing.assert_array_equal(coeffs[1], [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0])


def test_continuous_method_needs_temporal_order(regions, dofs):
    with pytest.raises(SpaceError) as exc_info:
        build_slab_space(METHODS.CG, 1, 0, regions, dofs, 0.0, 0.125)

    exc_info.match("k_t >= 1")


def test_empty_trial_space(regions, dofs):
    empty = replace(regions, elems_e=np.zeros(6, dtype=bool), elems_eplus=np.zeros(6, dtype=bool))

    with pytest.raises(SpaceError) as exc_info:
        build_slab_space(METHODS.DG, 1, 1, empty, dofs, 0.0, 0.125)

    exc_info.match("Empty trial space")


def test_evaluate_bilinear_function(regions, dofs):
    space = build_slab_space(METHODS.DG, 1, 1, regions, dofs, 0.0, 0.125)
    prob = make_problem(lambda x, t: np.asarray(x) - 0.6 + 0.0 * np.asarray(t), domain=(0.0, 1.0))
    ls = interpolate_levelset(prob, dofs.mesh, build_slabs(0.5, 4), 1, 1, 1)
    deformation = identity_deformation(ls)
    coeffs = np.stack([dofs.coordinates * 0.0, dofs.coordinates * 0.125])

    value, dx, dt = eval_discrete(coeffs, space, deformation, np.array([0.3, 0.55]), 0.1)

    np.testing.assert_allclose(value, [0.03, 0.055], atol=1e-15)
    np.testing.assert_allclose(dx, [0.1, 0.1], atol=1e-14)
    np.testing.assert_allclose(dt, [0.3, 0.55], atol=1e-14)

    value, _, _ = eval_on_element(coeffs, space, deformation, 1, 1.0, 0.125)
    assert value == pytest.approx(0.125 / 3.0)
