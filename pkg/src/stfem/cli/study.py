#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Study harness command-line interface."""

import typing as t

from pathlib import Path

import click

from stfem.config import RuntimeConfig
from stfem.const import METHODS, REFINEMENTS
from stfem.entities.error_report import StudyRow
from stfem.services.output import order_table, write_dat
from stfem.services.problems import PROBLEMS, get_problem
from stfem.services.studies import (
    run_convergence,
    run_epsf_study,
    run_gamma_study,
    run_nze_study,
    run_superconvergence,
    run_tint_comparison,
    series_name,
)

from .base import build_method_config, config_option, exit_on_error, load_runtime


problem_option = click.option(
    "--problem",
    type=click.Choice(list(PROBLEMS)),
    default="moving_interval",
    show_default=True,
)
out_dir_option = click.option(
    "--out-dir",
    type=click.Path(path_type=Path, file_okay=False),
    default=None,
    help="Directory of the .dat files [default: configured output directory].",
)
method_option = click.option(
    "--method",
    type=click.Choice([m.value for m in METHODS]),
    default=METHODS.DG.value,
    show_default=True,
)


def _emit(
    table: dict[str, list[StudyRow]],
    runtime: RuntimeConfig,
    out_dir: Path | None,
    metadata: dict[str, t.Any],
) -> None:
    directory = out_dir or runtime.OUTPUT.directory
    for series, rows in table.items():
        click.echo(f"== {series}")
        click.echo(order_table(rows))
        write_dat(
            rows,
            directory / f"{metadata['problem']}_{series}.dat",
            {**metadata, "series": series},
        )


@click.group()
def study() -> None:
    """Run convergence and cost studies and write .dat tables."""


@study.command()
@problem_option
@method_option
@click.option("--ks", "k_s", type=int, default=1, show_default=True)
@click.option("--kt", "k_t", type=int, default=1, show_default=True)
@click.option(
    "--refine",
    type=click.Choice([r.value for r in REFINEMENTS]),
    default=REFINEMENTS.BOTH.value,
    show_default=True,
)
@click.option("--nref", type=int, default=4, show_default=True)
@out_dir_option
@config_option
@click.pass_context
def convergence(  # noqa: PLR0913
    ctx: click.Context,
    problem: str,
    method: str,
    k_s: int,
    k_t: int,
    refine: str,
    nref: int,
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """Uniform refinement with k = q."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        cfg = build_method_config(
            method=method,
            k_s=k_s,
            k_t=k_t,
            refine=refine,
            gamma_j=runtime.DEFAULTS.gamma_j,
            eps_f=runtime.DEFAULTS.eps_f,
        )
        rows = run_convergence(cfg, prob, nref, runtime=runtime)
        _emit(
            {series_name(cfg): rows},
            runtime,
            out_dir,
            {"problem": problem, "study": "convergence", **cfg.model_dump(mode="json")},
        )


@study.command()
@problem_option
@method_option
@click.option("--k", "k", type=int, default=4, show_default=True)
@click.option("--nref", type=int, default=3, show_default=True)
@out_dir_option
@config_option
@click.pass_context
def gamma(  # noqa: PLR0913
    ctx: click.Context,
    problem: str,
    method: str,
    k: int,
    nref: int,
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """Convergence for a range of ghost penalty parameters."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        cfg = build_method_config(method=method, k_s=k, k_t=k, eps_f=runtime.DEFAULTS.eps_f)
        table = run_gamma_study(cfg, prob, nref, runtime=runtime)
        _emit(table, runtime, out_dir, {"problem": problem, "study": "gamma", "k": k})


@study.command()
@problem_option
@click.option("--ks", "k_s", type=int, default=3, show_default=True)
@click.option("--kt", "k_t", type=int, default=1, show_default=True)
@click.option("--is", "i_s", type=int, default=5, show_default=True)
@click.option("--it-max", type=int, default=4, show_default=True)
@out_dir_option
@config_option
@click.pass_context
def superconvergence(  # noqa: PLR0913
    ctx: click.Context,
    problem: str,
    k_s: int,
    k_t: int,
    i_s: int,
    it_max: int,
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """DG time refinement on a fixed fine mesh."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        cfg = build_method_config(
            k_s=k_s, k_t=k_t, q_s=k_s, q_t=k_s, gamma_j=runtime.DEFAULTS.gamma_j
        )
        rows = run_superconvergence(
            cfg, prob, i_s=i_s, levels=range(1, it_max + 1), runtime=runtime
        )
        _emit(
            {series_name(cfg, "time"): rows},
            runtime,
            out_dir,
            {"problem": problem, "study": "superconvergence", "i_s": i_s},
        )


@study.command()
@problem_option
@click.option("--k", "ks", type=int, multiple=True, default=(1, 2, 3), show_default=True)
@click.option("--is", "i_s", type=int, default=2, show_default=True)
@click.option("--it", "i_ts", type=int, multiple=True, default=(1, 3, 5), show_default=True)
@click.option("--epsf", "eps_f", type=float, default=None)
@out_dir_option
@config_option
@click.pass_context
def nze(  # noqa: PLR0913
    ctx: click.Context,
    problem: str,
    ks: tuple[int, ...],
    i_s: int,
    i_ts: tuple[int, ...],
    eps_f: float | None,
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """Matrix non-zeros of all methods."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        eps_f = runtime.DEFAULTS.eps_f if eps_f is None else eps_f
        table = run_nze_study(
            prob, ks=ks, i_s=i_s, i_ts=i_ts, eps_f=eps_f, runtime=runtime
        )
        _emit(
            table,
            runtime,
            out_dir,
            {"problem": problem, "study": "nze", "i_s": i_s, "eps_f": eps_f},
        )


@study.command()
@problem_option
@click.option("--k", "ks", type=int, multiple=True, default=(1, 2, 3), show_default=True)
@out_dir_option
@config_option
@click.pass_context
def epsf(
    ctx: click.Context,
    problem: str,
    ks: tuple[int, ...],
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """Matrix non-zeros of CG and CG box over the extension factor."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        table = run_epsf_study(prob, ks=ks, runtime=runtime)
        _emit(table, runtime, out_dir, {"problem": problem, "study": "epsf"})


@study.command()
@click.option("--problem", type=click.Choice(list(PROBLEMS)), default="poly_test")
@click.option("--k", "k", type=int, default=4, show_default=True)
@out_dir_option
@config_option
@click.pass_context
def tint(
    ctx: click.Context,
    problem: str,
    k: int,
    out_dir: Path | None,
    config_path: Path | None,
) -> None:
    """Topology-preserving against topology-insensitive time integration."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        prob = get_problem(problem, runtime.DEFAULTS.t_end)
        table = run_tint_comparison(
            prob, k=k, gamma_j=runtime.DEFAULTS.gamma_j, runtime=runtime
        )
        _emit(table, runtime, out_dir, {"problem": problem, "study": "tint", "k": k})
