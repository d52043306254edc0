#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Manufactured problems on moving and fixed 1D domains.

Sources are derived by hand from u_t + w u_x - u_xx = f; every problem
satisfies the homogeneous or exact Neumann condition on its boundary.
"""

from __future__ import annotations

import typing as t

from functools import partial

import numpy as np

from stfem.const import DEFAULT_T_END
from stfem.exc import ConfigurationError
from stfem.fem.levelset import ProblemDefinition
from stfem.logger import logger
from stfem.messages import W


if t.TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

    from stfem.fem.polynomials import FloatArray


INTERVAL_RADIUS = 0.5
"""Half width of the moving interval."""

POLY_RADIUS = 0.505
"""Half width of the interval of the polynomial stress test."""

POLY_VELOCITY = 0.5
"""Constant velocity of the polynomial stress test."""

STATIC_VELOCITY = 1.0
"""Constant velocity of the fitted static problem."""


def _constant(value: float, x: npt.ArrayLike, t: npt.ArrayLike) -> FloatArray:
    return np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, value)


def _rho(t: npt.ArrayLike) -> FloatArray:
    return np.sin(2.0 * np.pi * np.asarray(t)) / np.pi


def _rho_dt(t: npt.ArrayLike) -> FloatArray:
    return 2.0 * np.cos(2.0 * np.pi * np.asarray(t))


def manufactured_moving_interval(t_end: float = DEFAULT_T_END) -> ProblemDefinition:
    """Oscillating interval [rho - 1/2, rho + 1/2] with rho = sin(2 pi t) / pi.

    The solution u = cos(pi r / r_0) sin(pi t), r = |x - rho|, r_0 = 1/2, is
    transported with the domain, so the convective derivative reduces to
    the time derivative of the amplitude.

    Args:
        t_end (float): Final time.

    Returns:
        ProblemDefinition: The problem on the background domain [-1, 1].
    """

    def phi(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.abs(np.asarray(x) - _rho(t)) - INTERVAL_RADIUS

    def w(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.broadcast_to(_rho_dt(t), np.broadcast(x, t).shape).copy()

    def u(x: FloatArray, t: FloatArray) -> FloatArray:
        s = np.asarray(x) - _rho(t)
        return np.cos(np.pi * s / INTERVAL_RADIUS) * np.sin(np.pi * np.asarray(t))

    def f(x: FloatArray, t: FloatArray) -> FloatArray:
        t = np.asarray(t)
        s = np.asarray(x) - _rho(t)
        k = np.pi / INTERVAL_RADIUS
        return np.cos(k * s) * (np.pi * np.cos(np.pi * t) + k**2 * np.sin(np.pi * t))

    def u0(x: FloatArray) -> FloatArray:
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    def u0_dt(x: FloatArray) -> FloatArray:
        return np.pi * np.cos(np.pi * np.asarray(x) / INTERVAL_RADIUS)

    def boundary(t: float) -> FloatArray:
        rho = float(_rho(t))
        return np.array([rho - INTERVAL_RADIUS, rho + INTERVAL_RADIUS])

    return ProblemDefinition(
        name="moving_interval",
        phi=phi,
        w=w,
        f=f,
        u0=u0,
        domain=(-1.0, 1.0),
        t_end=t_end,
        w_inf=2.0,
        u_exact=u,
        u0_dt=u0_dt,
        boundary=boundary,
    )


def manufactured_poly_test(t_end: float = DEFAULT_T_END) -> ProblemDefinition:
    """Translating interval with a quartic solution vanishing doubly at its ends.

    With s = x - t/2 the solution is u = (s + R)^2 (s - R)^2, R = 0.505,
    so it is a polynomial of degree 4 in space and time and is reproduced
    exactly by order-4 spaces.

    Args:
        t_end (float): Final time.

    Returns:
        ProblemDefinition: The problem on the background domain [-1, 1].
    """
    r2 = POLY_RADIUS**2

    def shift(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.asarray(x) - POLY_VELOCITY * np.asarray(t)

    def phi(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.abs(shift(x, t)) - POLY_RADIUS

    def u(x: FloatArray, t: FloatArray) -> FloatArray:
        return (shift(x, t) ** 2 - r2) ** 2

    def f(x: FloatArray, t: FloatArray) -> FloatArray:
        return 4.0 * r2 - 12.0 * shift(x, t) ** 2

    def u0(x: FloatArray) -> FloatArray:
        return (np.asarray(x) ** 2 - r2) ** 2

    def u0_dt(x: FloatArray) -> FloatArray:
        x = np.asarray(x)
        return -POLY_VELOCITY * 4.0 * x * (x**2 - r2)

    def boundary(t: float) -> FloatArray:
        rho = POLY_VELOCITY * t
        return np.array([rho - POLY_RADIUS, rho + POLY_RADIUS])

    return ProblemDefinition(
        name="poly_test",
        phi=phi,
        w=partial(_constant, POLY_VELOCITY),
        f=f,
        u0=u0,
        domain=(-1.0, 1.0),
        t_end=t_end,
        w_inf=POLY_VELOCITY,
        u_exact=u,
        u0_dt=u0_dt,
        boundary=boundary,
    )


def manufactured_fitted_static(t_end: float = DEFAULT_T_END) -> ProblemDefinition:
    """Fixed domain [0, 1] filling the background mesh, u = x t.

    The level set is -1 everywhere, so nothing is cut; the exact flux
    du/dx = t is imposed at both ends.

    Args:
        t_end (float): Final time.

    Returns:
        ProblemDefinition: The problem on the background domain [0, 1].
    """

    def u(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.asarray(x) * np.asarray(t)

    def f(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.asarray(x) + STATIC_VELOCITY * np.asarray(t)

    def flux(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.broadcast_to(np.asarray(t, dtype=np.float64), np.broadcast(x, t).shape)

    def u0(x: FloatArray) -> FloatArray:
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    def u0_dt(x: FloatArray) -> FloatArray:
        return np.asarray(x, dtype=np.float64).copy()

    return ProblemDefinition(
        name="fitted_static",
        phi=partial(_constant, -1.0),
        w=partial(_constant, STATIC_VELOCITY),
        f=f,
        u0=u0,
        domain=(0.0, 1.0),
        t_end=t_end,
        w_inf=STATIC_VELOCITY,
        u_exact=u,
        u0_dt=u0_dt,
        neumann_flux=flux,
    )


PROBLEMS: dict[str, Callable[[float], ProblemDefinition]] = {
    "moving_interval": manufactured_moving_interval,
    "poly_test": manufactured_poly_test,
    "fitted_static": manufactured_fitted_static,
}
"""Problem factories by name."""


def get_problem(name: str, t_end: float | None = None) -> ProblemDefinition:
    """Build a manufactured problem by name.

    Args:
        name (str): One of the keys of ``PROBLEMS``.
        t_end (float | None): Final time; the problem default if None.

    Returns:
        ProblemDefinition: The problem.

    Raises:
        ConfigurationError: If the name is unknown.
    """
    factory = PROBLEMS.get(name)
    if factory is None:
        error = f"Unknown problem {name!r}; choose one of {', '.join(PROBLEMS)}."
        raise ConfigurationError(error)
    return factory(DEFAULT_T_END if t_end is None else t_end)


def check_boundary_transport(
    prob: ProblemDefinition,
    *,
    n_samples: int = 32,
    step: float = 1e-6,
    tol: float = 1e-6,
) -> float:
    """Check that boundary points move with the velocity field.

    The boundary trajectories x(t) are differentiated by central
    differences and compared with w(x(t), t).

    Args:
        prob (ProblemDefinition): The problem.
        n_samples (int): Number of sampled times in (0, T).
        step (float): Finite difference step.
        tol (float): Largest accepted defect, reported as a warning.

    Returns:
        float: Largest defect |x'(t) - w(x(t), t)|; 0 for fixed domains.
    """
    if prob.boundary is None:
        return 0.0

    worst, worst_t = 0.0, 0.0
    times = np.linspace(0.0, prob.t_end, n_samples + 2)[1:-1]
    for time in times:
        points = prob.boundary(float(time))
        speed = (prob.boundary(time + step) - prob.boundary(time - step)) / (2 * step)
        velocity = np.asarray(prob.w(points, np.full_like(points, time)))
        defect = float(np.max(np.abs(speed - velocity)))
        if defect > worst:
            worst, worst_t = defect, float(time)

    if worst > tol:
        logger.warning(
            W.WEAK_TRANSPORT, {"problem": prob.name, "defect": worst, "t": worst_t}
        )
    return worst
