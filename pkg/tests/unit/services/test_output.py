import logging

import pytest

from stfem.const import DAT_COLUMNS, LOGGER_NAME
from stfem.entities.error_report import ErrorReport, StudyRow
from stfem.services.output import order_table, read_dat, write_dat


@pytest.fixture
def rows():
    return [
        StudyRow(
            series="dg_ks1_kt1",
            i=i,
            report=ErrorReport(
                l2_final=0.25**i,
                l2l2=0.5**i,
                geom_dist=0.0,
                nze_min=10,
                nze_max=12 * (i + 1),
                wall=0.1,
            ),
        )
        for i in range(3)
    ]


def test_write_and_read_dat(rows, tmp_path, caplog):
    caplog.set_level(logging.INFO, logger=LOGGER_NAME)
    path = tmp_path / "nested" / "moving_interval_dg_ks1_kt1.dat"

    written = write_dat(rows, path, {"problem": "moving_interval", "k_s": 1})
    metadata, data = read_dat(written)

    assert written == path
    assert metadata == {
        "problem": "moving_interval",
        "k_s": 1,
        "columns": list(DAT_COLUMNS),
    }
    assert data.shape == (3, len(DAT_COLUMNS))
    assert data[:, 0].tolist() == [0.0, 1.0, 2.0]
    assert data[2, 1] == pytest.approx(0.0625)
    assert data[2, 3] == 36.0
    assert "I005" in caplog.text


def test_single_row_file(rows, tmp_path):
    _, data = read_dat(write_dat(rows[:1], tmp_path / "one.dat", {}))

    assert data.shape == (1, len(DAT_COLUMNS))


def test_order_table(rows):
    lines = order_table(rows).splitlines()

    assert len(lines) == 4
    assert "l2_final" in lines[0]
    assert "eoc" in lines[0]
    assert lines[1].split()[0] == "0"
    assert lines[2].split()[2] == "2.00"
    assert lines[2].split()[4] == "1.00"
    assert lines[3].split()[-1] == "36"
