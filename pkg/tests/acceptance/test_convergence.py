import pytest

from stfem.config import RuntimeConfig
from stfem.entities.method_config import MethodConfig
from stfem.services.problems import get_problem
from stfem.services.studies import (
    mean_last_orders,
    run_convergence,
    run_gamma_study,
    run_superconvergence,
)


pytestmark = pytest.mark.slow


@pytest.fixture
def runtime():
    return RuntimeConfig()


@pytest.fixture
def moving_interval():
    return get_problem("moving_interval")


def errors(rows, column):
    return [getattr(row.report, column) for row in rows]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dg_convergence_and_geometry(k, moving_interval, runtime):
    cfg = MethodConfig(k_s=k, k_t=k)

    rows = run_convergence(cfg, moving_interval, 6 - k, runtime=runtime)

    assert mean_last_orders(errors(rows, "l2_final")) >= k + 0.6
    assert mean_last_orders(errors(rows, "l2l2")) >= k + 0.6
    assert mean_last_orders(errors(rows, "geom_dist")) >= k + 0.6


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cg_convergence(k, moving_interval, runtime):
    cfg = MethodConfig(method="cg", k_s=k, k_t=k)

    rows = run_convergence(cfg, moving_interval, 6 - k, runtime=runtime)

    assert mean_last_orders(errors(rows, "l2_final")) >= k + 0.6
    assert mean_last_orders(errors(rows, "l2l2")) >= k + 0.6


def test_gcc_convergence(moving_interval, runtime):
    cfg = MethodConfig(method="gcc", k_s=3, k_t=3)

    rows = run_convergence(cfg, moving_interval, 4, runtime=runtime)

    assert mean_last_orders(errors(rows, "l2_final")) >= 3.6
    assert mean_last_orders(errors(rows, "l2l2")) >= 3.6


def test_ghost_penalty_robustness(moving_interval, runtime):
    cfg = MethodConfig(k_s=4, k_t=4)

    table = run_gamma_study(cfg, moving_interval, 3, runtime=runtime)

    assert len(table) == 4
    for rows in table.values():
        assert mean_last_orders(errors(rows, "l2_final")) >= 4.5
        assert mean_last_orders(errors(rows, "l2l2")) >= 4.5


def test_dg_final_time_superconvergence(moving_interval, runtime):
    cfg = MethodConfig(k_s=3, k_t=1, q_s=3, q_t=3)

    rows = run_superconvergence(
        cfg, moving_interval, i_s=5, levels=(1, 2, 3, 4), runtime=runtime
    )

    assert mean_last_orders(errors(rows, "l2_final")) >= 2.5
    assert 1.6 <= mean_last_orders(errors(rows, "l2l2")) <= 2.4
