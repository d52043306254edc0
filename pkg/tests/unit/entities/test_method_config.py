import pytest

from pydantic import ValidationError

from stfem.const import METHODS, REFINEMENTS, TIME_RULES
from stfem.entities.method_config import MethodConfig


def test_defaults():
    cfg = MethodConfig()

    assert cfg.method is METHODS.DG
    assert (cfg.k_s, cfg.k_t, cfg.q_s, cfg.q_t) == (1, 1, 1, 1)
    assert cfg.gamma_j == 0.05
    assert cfg.eps_f == 1.1
    assert cfg.label == "dg/k=(1,1)/q=(1,1)/i=(0,0)"


def test_geometry_orders_follow_discretisation_orders():
    cfg = MethodConfig.model_validate({"method": "cg", "k_s": 3, "k_t": 2})

    assert cfg.method is METHODS.CG
    assert (cfg.q_s, cfg.q_t) == (3, 2)

    explicit = MethodConfig(k_s=3, k_t=1, q_s=3, q_t=3)
    assert (explicit.q_s, explicit.q_t) == (3, 3)


@pytest.mark.parametrize(
    ("fields", "message"),
    [
        ({"method": "gcc", "k_t": 2}, "k_t must be 3"),
        ({"method": "cg", "k_t": 0}, "k_t >= 1"),
        ({"method": "cgbox", "k_t": 0}, "k_t >= 1"),
        ({"eps_f": 0.9}, "greater than or equal to 1"),
        ({"k_s": 0}, "greater than or equal to 1"),
        ({"unknown": 1}, "Extra inputs are not permitted"),
    ],
)
def test_invalid_configurations(fields, message):
    with pytest.raises(ValidationError) as exc_info:
        MethodConfig.model_validate(fields)

    exc_info.match(message)


def test_gcc_and_dg_zero_order_are_valid():
    assert MethodConfig(method=METHODS.GCC, k_s=3, k_t=3).q_t == 3
    assert MethodConfig(k_t=0).k_t == 0


@pytest.mark.parametrize(
    ("refine", "expected"),
    [
        (REFINEMENTS.BOTH, (3, 3)),
        (REFINEMENTS.SPACE, (3, 1)),
        (REFINEMENTS.TIME, (2, 3)),
    ],
)
def test_level(refine, expected):
    cfg = MethodConfig(refine=refine, i_s=2, i_t=1)

    refined = cfg.level(3)

    assert (refined.i_s, refined.i_t) == expected
    assert refined.refine is refine


def test_quadrature_options():
    cfg = MethodConfig(tint=TIME_RULES.INSENSITIVE, substeps=10, order_factor=2)

    options = cfg.quadrature

    assert options.mode is TIME_RULES.INSENSITIVE
    assert options.substeps == 10
    assert options.order_factor == 2
    assert options.spatial_order is None


def test_frozen():
    cfg = MethodConfig()

    with pytest.raises(ValidationError):
        cfg.k_s = 2


def test_replace_keeps_other_fields():
    cfg = MethodConfig(method=METHODS.CG, k_s=2, k_t=2, eps_f=1.5, i_s=3)

    copy = cfg.replace(gamma_j=0.5)

    assert copy.gamma_j == 0.5
    assert (copy.method, copy.k_s, copy.k_t, copy.eps_f, copy.i_s) == (
        METHODS.CG, 2, 2, 1.5, 3,
    )
    assert cfg.gamma_j == 0.05


@pytest.mark.parametrize(
    ("cfg", "update", "message"),
    [
        (MethodConfig(method=METHODS.GCC, k_s=3, k_t=3), {"k_t": 2}, "k_t must be 3"),
        (MethodConfig(k_s=2, k_t=2), {"method": "gcc"}, "k_t must be 3"),
        (MethodConfig(k_t=0), {"method": METHODS.CGBOX}, "k_t >= 1"),
        (MethodConfig(), {"gamma_j": -1.0}, "greater than or equal to 0"),
        (MethodConfig(), {"eps_f": 0.5}, "greater than or equal to 1"),
        (MethodConfig(), {"unknown": 1}, "Extra inputs are not permitted"),
    ],
)
def test_replace_revalidates(cfg, update, message):
    with pytest.raises(ValidationError) as exc_info:
        cfg.replace(**update)

    exc_info.match(message)

