import logging

from dataclasses import replace

import numpy as np
import pytest

from stfem.const import LOGGER_NAME
from stfem.exc import ConfigurationError
from stfem.services.problems import PROBLEMS, check_boundary_transport, get_problem


STEP = 1e-4


def pde_residual(prob, x, t):
    u = prob.u_exact
    u_t = (u(x, t + STEP) - u(x, t - STEP)) / (2 * STEP)
    u_x = (u(x + STEP, t) - u(x - STEP, t)) / (2 * STEP)
    u_xx = (u(x + STEP, t) - 2 * u(x, t) + u(x - STEP, t)) / STEP**2
    return u_t + prob.w(x, t) * u_x - u_xx - prob.f(x, t)


@pytest.mark.parametrize("name", list(PROBLEMS))
def test_get_problem(name):
    prob = get_problem(name)

    assert prob.name == name
    assert prob.t_end == 0.5
    assert get_problem(name, 1.0).t_end == 1.0


def test_get_unknown_problem():
    with pytest.raises(ConfigurationError) as exc_info:
        get_problem("circle")

    exc_info.match("Unknown problem 'circle'")


@pytest.mark.parametrize("name", list(PROBLEMS))
def test_manufactured_source_is_consistent(name):
    prob = get_problem(name)
    t = np.linspace(0.05, 0.45, 9)
    offsets = np.linspace(-0.3, 0.3, 9)
    if prob.boundary is None:
        x = offsets + 0.5
    else:
        x = np.array([prob.boundary(float(s)).mean() for s in t]) + offsets

    residual = pde_residual(prob, x, t)

    np.testing.assert_allclose(residual, 0.0, atol=1e-4)


@pytest.mark.parametrize("name", ["moving_interval", "poly_test"])
def test_homogeneous_flux_on_the_boundary(name):
    prob = get_problem(name)

    for t in (0.1, 0.3, 0.5):
        ends = prob.boundary(t)
        flux = (prob.u_exact(ends + STEP, t) - prob.u_exact(ends - STEP, t)) / (2 * STEP)
        np.testing.assert_allclose(flux, 0.0, atol=1e-6)
        np.testing.assert_allclose(prob.phi(ends, t), 0.0, atol=1e-14)


@pytest.mark.parametrize("name", list(PROBLEMS))
def test_initial_data_match_exact_solution(name):
    prob = get_problem(name)
    x = np.linspace(-0.4, 0.4, 7) + (0.5 if name == "fitted_static" else 0.0)

    np.testing.assert_allclose(prob.u0(x), prob.u_exact(x, np.zeros_like(x)), atol=1e-14)
    u_t = (prob.u_exact(x, STEP) - prob.u_exact(x, -STEP)) / (2 * STEP)
    np.testing.assert_allclose(prob.u0_dt(x), u_t, atol=1e-5)


def test_fitted_static_flux():
    prob = get_problem("fitted_static")

    np.testing.assert_allclose(prob.neumann_flux(np.array([0.0, 1.0]), 0.25), [0.25, 0.25])
    assert (prob.phi(np.linspace(0, 1, 5), 0.3) < 0).all()


@pytest.mark.parametrize("name", ["moving_interval", "poly_test"])
def test_boundary_moves_with_velocity(name):
    assert check_boundary_transport(get_problem(name)) < 1e-6


def test_fixed_domain_has_no_transport_defect(fitted_static):
    assert check_boundary_transport(fitted_static) == 0.0


def test_weak_transport_is_reported(poly_test, caplog):
    caplog.set_level(logging.WARNING, logger=LOGGER_NAME)
    resting = replace(poly_test, w=lambda x, t: np.zeros(np.broadcast(x, t).shape))

    defect = check_boundary_transport(resting)

    assert defect == pytest.approx(0.5, rel=1e-6)
    assert "W001" in caplog.text
