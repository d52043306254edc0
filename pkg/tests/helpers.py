import json

from pathlib import Path
from typing import Any

import numpy as np

from scipy import integrate


def load_json_data(file_path: str) -> dict[str, Any]:
    with (Path(__file__).parent / file_path).open() as file:
        return json.load(file)


def adaptive_space_time_integral(func, t_lo, t_hi, x_lo, x_hi, *, tol=1e-13) -> float:
    """Integrate func(x, t) over {(x, t): t_lo < t < t_hi, x_lo(t) < x < x_hi(t)}."""

    def lower(t):
        return float(x_lo(t)) if callable(x_lo) else float(x_lo)

    def upper(t):
        return max(float(x_hi(t)) if callable(x_hi) else float(x_hi), lower(t))

    value, _ = integrate.dblquad(
        lambda x, t: float(func(x, t)), t_lo, t_hi, lower, upper, epsabs=tol, epsrel=tol
    )
    return value


def adaptive_integral(func, lo, hi, *, tol=1e-13) -> float:
    """Integrate func(x) over [lo, hi]."""
    value, _ = integrate.quad(lambda x: float(func(x)), lo, hi, epsabs=tol, epsrel=tol)
    return value


def adaptive_vector_integral(func, lo, hi, *, points=None, tol=1e-12) -> np.ndarray:
    """Integrate a vector-valued func(s) over [lo, hi]."""
    if hi <= lo:
        return np.zeros_like(np.asarray(func(lo), dtype=np.float64))
    value, _ = integrate.quad_vec(
        func, lo, hi, epsabs=tol, epsrel=10 * tol, norm="max", limit=200, points=points
    )
    return np.asarray(value, dtype=np.float64)


def eoc(errors) -> np.ndarray:
    """Observed orders of consecutive errors."""
    errors = np.asarray(errors, dtype=np.float64)
    return np.log2(errors[:-1] / errors[1:])


def make_problem(phi, *, domain=(-1.0, 1.0), velocity=1.0, t_end=0.5):
    """Problem with a given level set, unit data and constant velocity."""
    from stfem.fem.levelset import ProblemDefinition

    def constant(value):
        def field(x, t):
            return np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, value)

        return field

    return ProblemDefinition(
        name="custom",
        phi=phi,
        w=constant(velocity),
        f=constant(1.0),
        u0=lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
        domain=domain,
        t_end=t_end,
        w_inf=abs(velocity),
    )
