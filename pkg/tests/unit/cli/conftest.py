import typing as t

import pytest

from click.testing import CliRunner

from stfem.cli.base import register_cli_commands, stfem
from stfem.entities.error_report import ErrorReport, StudyRow


if t.TYPE_CHECKING:
    from pytest_mock import MockerFixture


@pytest.fixture
def cli():
    register_cli_commands(stfem)
    return stfem


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def quiet_logger(mocker: "MockerFixture"):
    return mocker.patch("stfem.cli.base.setup_logger")


@pytest.fixture
def report():
    return ErrorReport(
        l2_final=1e-3, l2l2=2e-3, geom_dist=1e-4, nze_min=30, nze_max=40, wall=0.2
    )


@pytest.fixture
def rows(report):
    return [StudyRow(series="dg_ks1_kt1", i=i, report=report) for i in range(2)]
