#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Single run and refinement series command-line interface."""

from pathlib import Path

import click

from stfem.const import METHODS, REFINEMENTS, TIME_RULES
from stfem.entities.error_report import StudyRow
from stfem.services.march import march
from stfem.services.output import order_table, write_dat
from stfem.services.problems import PROBLEMS, get_problem
from stfem.services.studies import run_convergence

from .base import build_method_config, config_option, exit_on_error, load_runtime


@click.command()
@click.option(
    "--problem",
    type=click.Choice(list(PROBLEMS)),
    default="moving_interval",
    show_default=True,
)
@click.option(
    "--method",
    type=click.Choice([m.value for m in METHODS]),
    default=METHODS.DG.value,
    show_default=True,
)
@click.option("--ks", "k_s", type=int, default=1, show_default=True)
@click.option("--kt", "k_t", type=int, default=1, show_default=True)
@click.option("--qs", "q_s", type=int, default=None, help="Defaults to --ks.")
@click.option("--qt", "q_t", type=int, default=None, help="Defaults to --kt.")
@click.option("--gamma", "gamma_j", type=float, default=None)
@click.option("--epsf", "eps_f", type=float, default=None)
@click.option(
    "--tint",
    type=click.Choice([r.value for r in TIME_RULES]),
    default=TIME_RULES.PRESERVE.value,
    show_default=True,
)
@click.option("--substeps", type=int, default=1, show_default=True)
@click.option("--order-factor", type=int, default=1, show_default=True)
@click.option(
    "--refine",
    type=click.Choice([r.value for r in REFINEMENTS]),
    default=REFINEMENTS.BOTH.value,
    show_default=True,
)
@click.option("--nref", type=int, default=None, help="Run levels 0..NREF.")
@click.option("--is", "i_s", type=int, default=0, show_default=True)
@click.option("--it", "i_t", type=int, default=0, show_default=True)
@click.option("--t-end", type=float, default=None)
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None)
@config_option
@click.pass_context
def run(  # noqa: PLR0913
    ctx: click.Context,
    problem: str,
    method: str,
    k_s: int,
    k_t: int,
    q_s: int | None,
    q_t: int | None,
    gamma_j: float | None,
    eps_f: float | None,
    tint: str,
    substeps: int,
    order_factor: int,
    refine: str,
    nref: int | None,
    i_s: int,
    i_t: int,
    t_end: float | None,
    out: Path | None,
    config_path: Path | None,
) -> None:
    """Solve a manufactured problem on one level or a refinement series."""
    with exit_on_error(ctx):
        runtime = load_runtime(config_path)
        defaults = runtime.DEFAULTS
        cfg = build_method_config(
            method=method,
            k_s=k_s,
            k_t=k_t,
            q_s=q_s,
            q_t=q_t,
            gamma_j=defaults.gamma_j if gamma_j is None else gamma_j,
            eps_f=defaults.eps_f if eps_f is None else eps_f,
            tint=tint,
            substeps=substeps,
            order_factor=order_factor,
            refine=refine,
            i_s=i_s,
            i_t=i_t,
        )
        prob = get_problem(problem, defaults.t_end if t_end is None else t_end)

        if nref is None:
            result = march(cfg, prob, runtime=runtime)
            rows = [StudyRow(series=problem, i=max(i_s, i_t), report=result.report)]
        else:
            rows = run_convergence(cfg, prob, nref, runtime=runtime)

        click.echo(order_table(rows))
        if out is not None:
            metadata = {
                "problem": problem,
                "t_end": prob.t_end,
                **cfg.model_dump(mode="json"),
            }
            write_dat(rows, out, metadata)
