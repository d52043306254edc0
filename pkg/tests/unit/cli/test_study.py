import typing as t

from stfem.services.output import read_dat


if t.TYPE_CHECKING:
    from pytest_mock import MockerFixture


def test_convergence_writes_series(cli, runner, rows, tmp_path, mocker: "MockerFixture"):
    series = mocker.patch("stfem.cli.study.run_convergence", return_value=rows)

    result = runner.invoke(
        cli,
        ["study", "convergence", "--ks", "2", "--kt", "2", "--refine", "space",
         "--nref", "3", "--out-dir", str(tmp_path)],
    )

    assert result.exit_code == 0, result.output
    assert "== dg_ks2_kt2" in result.output
    cfg, _, nref = series.call_args.args
    assert (cfg.k_s, cfg.k_t, cfg.refine, nref) == (2, 2, "space", 3)
    metadata, data = read_dat(tmp_path / "moving_interval_dg_ks2_kt2.dat")
    assert metadata["study"] == "convergence"
    assert metadata["series"] == "dg_ks2_kt2"
    assert data.shape[0] == 2


def test_gamma_writes_one_file_per_parameter(
    cli, runner, rows, tmp_path, mocker: "MockerFixture"
):
    mocker.patch(
        "stfem.cli.study.run_gamma_study",
        return_value={"dg_ks4_kt4_gamma5": rows, "dg_ks4_kt4_gamma0.05": rows},
    )

    result = runner.invoke(
        cli, ["study", "gamma", "--problem", "poly_test", "--out-dir", str(tmp_path)]
    )

    assert result.exit_code == 0, result.output
    assert sorted(path.name for path in tmp_path.iterdir()) == [
        "poly_test_dg_ks4_kt4_gamma0.05.dat",
        "poly_test_dg_ks4_kt4_gamma5.dat",
    ]


def test_superconvergence_uses_time_refinement(
    cli, runner, rows, tmp_path, mocker: "MockerFixture"
):
    study = mocker.patch("stfem.cli.study.run_superconvergence", return_value=rows)

    result = runner.invoke(
        cli, ["study", "superconvergence", "--is", "3", "--it-max", "2", "--out-dir", str(tmp_path)]
    )

    assert result.exit_code == 0, result.output
    cfg = study.call_args.args[0]
    assert (cfg.k_s, cfg.k_t, cfg.q_s, cfg.q_t) == (3, 1, 3, 3)
    assert study.call_args.kwargs["i_s"] == 3
    assert list(study.call_args.kwargs["levels"]) == [1, 2]
    assert (tmp_path / "moving_interval_dg_ks3_kt1_time.dat").is_file()


def test_nze_uses_configured_extension_factor(
    cli, runner, rows, tmp_path, mocker: "MockerFixture"
):
    study = mocker.patch("stfem.cli.study.run_nze_study", return_value={"gcc_ks3_kt3_nze": rows})

    result = runner.invoke(
        cli, ["study", "nze", "--k", "3", "--it", "1", "--it", "2", "--out-dir", str(tmp_path)]
    )

    assert result.exit_code == 0, result.output
    kwargs = study.call_args.kwargs
    assert (kwargs["ks"], kwargs["i_ts"], kwargs["eps_f"]) == ((3,), (1, 2), 1.1)
    metadata, _ = read_dat(tmp_path / "moving_interval_gcc_ks3_kt3_nze.dat")
    assert metadata["eps_f"] == 1.1


def test_epsf_and_tint(cli, runner, rows, tmp_path, mocker: "MockerFixture"):
    epsf = mocker.patch("stfem.cli.study.run_epsf_study", return_value={"cg_ks1_kt1_epsf": rows})
    tint = mocker.patch(
        "stfem.cli.study.run_tint_comparison", return_value={"dg_ks4_kt4_preserve": rows}
    )

    first = runner.invoke(cli, ["study", "epsf", "--k", "1", "--out-dir", str(tmp_path)])
    second = runner.invoke(cli, ["study", "tint", "--out-dir", str(tmp_path)])

    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output
    assert epsf.call_args.kwargs["ks"] == (1,)
    assert tint.call_args.args[0].name == "poly_test"
    assert tint.call_args.kwargs["gamma_j"] == 0.05
    assert (tmp_path / "moving_interval_cg_ks1_kt1_epsf.dat").is_file()
    assert (tmp_path / "poly_test_dg_ks4_kt4_preserve.dat").is_file()


def test_unknown_study_option(cli, runner):
    result = runner.invoke(cli, ["study", "nze", "--method", "dg"])

    assert result.exit_code == 2
