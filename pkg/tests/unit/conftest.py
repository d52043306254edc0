import pytest

from stfem import config as config_module
from stfem.config import RuntimeConfig
from stfem.fem.levelset import interpolate_levelset
from stfem.fem.mesh import build_mesh, build_slabs
from stfem.services.problems import get_problem


@pytest.fixture(autouse=True)
def reset_runtime_config():
    yield
    config_module.reset_config()


@pytest.fixture
def test_config():
    return RuntimeConfig.model_validate({
        "LOG": {
            "level": "DEBUG",
        },
        "SOLVER": {
            "pivot_tolerance": 1e-13,
        },
        "DEFAULTS": {
            "gamma_j": 0.05,
            "eps_f": 1.1,
            "t_end": 0.5,
        },
    })


@pytest.fixture
def moving_interval():
    return get_problem("moving_interval")


@pytest.fixture
def poly_test():
    return get_problem("poly_test")


@pytest.fixture
def fitted_static():
    return get_problem("fitted_static")


@pytest.fixture
def coarse_mesh():
    return build_mesh(-1.0, 1.0, 8)


@pytest.fixture
def coarse_slabs():
    return build_slabs(0.5, 4)


@pytest.fixture
def first_levelset(moving_interval, coarse_mesh, coarse_slabs):
    return interpolate_levelset(moving_interval, coarse_mesh, coarse_slabs, 1, 2, 2)
