import pytest

from stfem.config import RuntimeConfig
from stfem.services.problems import get_problem
from stfem.services.studies import run_nze_study, run_tint_comparison


pytestmark = pytest.mark.slow


def test_topology_preserving_integration_is_exact():
    table = run_tint_comparison(get_problem("poly_test"), runtime=RuntimeConfig())

    preserve = [row.report.l2_final for row in table["dg_ks4_kt4_preserve"]]
    insensitive = [row.report.l2_final for row in table["dg_ks4_kt4_insensitive"]]
    substeps = [row.report.l2_final for row in table["dg_ks4_kt4_insensitive_substeps10"]]

    assert max(preserve) <= 1e-9
    assert max(insensitive[1:]) > 1e-6
    assert max(substeps) * 100 <= max(insensitive)


def test_nze_ordering():
    table = run_nze_study(
        get_problem("moving_interval"), ks=(1, 2, 3), eps_f=1.1, runtime=RuntimeConfig()
    )

    def nze(name):
        return [row.report.nze_max for row in table[name]]

    for dg, cg, gcc in zip(
        nze("dg_ks3_kt3_nze"), nze("cg_ks3_kt3_nze"), nze("gcc_ks3_kt3_nze"), strict=True
    ):
        assert dg > cg > gcc
    for k in (1, 2, 3):
        for box, cg in zip(nze(f"cgbox_ks{k}_kt{k}_nze"), nze(f"cg_ks{k}_kt{k}_nze"), strict=True):
            assert box >= cg
