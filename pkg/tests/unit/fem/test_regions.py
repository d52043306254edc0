import numpy as np
import pytest

from stfem.exc import GeometryError
from stfem.fem.levelset import interpolate_levelset
from stfem.fem.mesh import build_mesh, build_slabs
from stfem.fem.regions import (
    build_regions,
    check_extension_constraint,
    classify_elements,
    extended_region,
    facet_sets,
)
from tests.helpers import make_problem


@pytest.fixture
def static_levelset():
    prob = make_problem(lambda x, t: np.asarray(x) - 0.3 + 0.0 * np.asarray(t))
    return interpolate_levelset(prob, build_mesh(-1.0, 1.0, 8), build_slabs(0.5, 4), 1, 1, 1)


def indices(mask):
    return np.flatnonzero(mask).tolist()


def test_classify_static_interface(static_levelset):
    elems_e, elems_i, elems_cut = classify_elements(static_levelset)

    assert indices(elems_e) == [0, 1, 2, 3, 4, 5]
    assert indices(elems_i) == [0, 1, 2, 3, 4]
    assert indices(elems_cut) == [5]


def test_extended_region_static_interface(static_levelset):
    elems_eplus, elems_s, delta = extended_region(static_levelset, 1.1, 1.0)

    assert delta == pytest.approx(1.1 * 0.125)
    assert indices(elems_eplus) == [0, 1, 2, 3, 4, 5]
    assert indices(elems_s) == [4, 5]


def test_build_regions_static_interface(static_levelset):
    regions = build_regions(static_levelset, 1.1, 1.0)

    assert regions.slab_index == 1
    assert regions.n_cut == 1
    assert regions.facets_r.tolist() == [5]
    assert regions.facets_rext.tolist() == [4, 5]
    assert regions.facets_rplus.tolist() == [4, 5]
    assert check_extension_constraint(regions)
    assert not check_extension_constraint(regions, np.ones(8, dtype=bool))


def test_moving_interval_regions(first_levelset):
    regions = build_regions(first_levelset, 1.1, 2.0)

    assert np.all(regions.elems_e[regions.elems_i])
    np.testing.assert_array_equal(regions.elems_cut, regions.elems_e & ~regions.elems_i)
    assert regions.n_cut >= 2
    assert check_extension_constraint(regions)
    assert np.all(regions.elems_eplus[regions.elems_s])


def test_interface_on_vertex_is_not_cut():
    prob = make_problem(lambda x, t: np.asarray(x) - 0.25 + 0.0 * np.asarray(t))
    ls = interpolate_levelset(prob, build_mesh(-1.0, 1.0, 8), build_slabs(0.5, 4), 1, 1, 1)

    elems_e, elems_i, elems_cut = classify_elements(ls)

    assert indices(elems_e) == [0, 1, 2, 3, 4]
    assert indices(elems_i) == [0, 1, 2, 3, 4]
    assert not elems_cut.any()


def test_touching_trajectory_is_not_active():
    # the vertex x = 0 touches zero at t = 0.0625 from above
    prob = make_problem(lambda x, t: np.asarray(x) ** 2 + 16.0 * (np.asarray(t) - 0.0625) ** 2)
    ls = interpolate_levelset(prob, build_mesh(-1.0, 1.0, 8), build_slabs(0.5, 4), 1, 2, 2)

    elems_e, _, elems_cut = classify_elements(ls, 8)

    assert not elems_e.any()
    assert not elems_cut.any()


def test_small_domain_inside_two_elements():
    prob = make_problem(
        lambda x, t: np.asarray(x) ** 2 + (np.asarray(t) - 0.0625) ** 2 - 0.01
    )
    ls = interpolate_levelset(prob, build_mesh(-1.0, 1.0, 8), build_slabs(0.5, 4), 1, 2, 2)

    elems_e, elems_i, elems_cut = classify_elements(ls)

    assert indices(elems_e) == [3, 4]
    assert not elems_i.any()
    assert indices(elems_cut) == [3, 4]


def test_too_few_samples(static_levelset):
    with pytest.raises(GeometryError) as exc_info:
        classify_elements(static_levelset, 2)

    exc_info.match("time samples")


def test_extension_factor_below_one(static_levelset):
    with pytest.raises(GeometryError):
        extended_region(static_levelset, 0.9, 1.0)


def test_facet_growth_alternates_sides():
    elems_e = np.ones(10, dtype=bool)
    elems_i = elems_e.copy()
    elems_i[[4, 5]] = False
    none = np.zeros(10, dtype=bool)

    facets_r, facets_rext, facets_rplus = facet_sets(elems_e, elems_i, none, none)

    assert facets_r.tolist() == [4, 5, 6]
    assert facets_rext.tolist() == [3, 4, 5, 6, 7]
    assert facets_rplus.size == 0


def test_facet_growth_at_domain_boundary():
    elems_e = np.ones(4, dtype=bool)
    elems_i = np.array([False, True, True, True])

    _, facets_rext, _ = facet_sets(elems_e, elems_i, elems_e, ~elems_i)

    assert facets_rext.tolist() == [1, 2]
