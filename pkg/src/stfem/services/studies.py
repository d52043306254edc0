#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Convergence, stabilisation, cost and time integration studies."""

from __future__ import annotations

import typing as t

import numpy as np

from stfem.config import SolverConfig, get_config
from stfem.const import METHODS, REFINEMENTS, TIME_RULES
from stfem.entities.error_report import StudyRow
from stfem.entities.method_config import MethodConfig
from stfem.exc import ExtensionConstraintError
from stfem.logger import logger
from stfem.messages import I

from .march import march


if t.TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from stfem.config import RuntimeConfig
    from stfem.fem.levelset import ProblemDefinition


type StudyTable = dict[str, list[StudyRow]]
"""Study rows by series name."""

GAMMA_VALUES = (5e4, 5.0, 0.05, 5e-4)
"""Ghost penalty parameters of the stabilisation study."""

EPS_F_VALUES = (1.0, 1.1, 1.5, 2.0, 5.0, 10.0, 100.0)
"""Extension factors of the strip width sweep."""

TINY_GAMMA = 5e-20
"""Ghost penalty parameter exposing unstable time integration."""


def observed_orders(errors: Sequence[float]) -> list[float]:
    """Observed orders log2(e_i / e_{i+1}) of consecutive levels.

    Args:
        errors (Sequence[float]): Errors on successive uniform refinements.

    Returns:
        list[float]: One order per consecutive pair; nan where undefined.
    """
    values = np.asarray(errors, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(values[:-1] / values[1:])
    return [float(o) if np.isfinite(o) else float("nan") for o in orders]


def mean_last_orders(errors: Sequence[float], count: int = 2) -> float:
    """Mean of the observed orders of the last pairs.

    Args:
        errors (Sequence[float]): Errors on successive uniform refinements.
        count (int): Number of trailing pairs averaged.

    Returns:
        float: The mean order.
    """
    return float(np.mean(observed_orders(errors)[-count:]))


def run_series(
    template: MethodConfig,
    prob: ProblemDefinition,
    levels: Iterable[int],
    series: str,
    *,
    runtime: RuntimeConfig | None = None,
) -> list[StudyRow]:
    """Run a configuration on successive refinement levels.

    Args:
        template (MethodConfig): Configuration refined by ``level``.
        prob (ProblemDefinition): The problem.
        levels (Iterable[int]): Refinement levels.
        series (str): Name of the series.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        list[StudyRow]: One row per level.
    """
    rows: list[StudyRow] = []
    for i in levels:
        result = march(template.level(i), prob, runtime=runtime)
        row = StudyRow(series=series, i=i, report=result.report)
        logger.info(
            I.STUDY_ROW,
            {
                "i": i,
                "series": series,
                "l2_final": row.report.l2_final,
                "l2l2": row.report.l2l2,
            },
        )
        rows.append(row)

    orders = observed_orders([row.report.l2_final for row in rows])
    logger.info(
        I.OBSERVED_ORDERS,
        {"series": series, "orders": ", ".join(f"{o:.2f}" for o in orders)},
    )
    return rows


def series_name(cfg: MethodConfig, suffix: str = "") -> str:
    """File-friendly name of a series.

    Args:
        cfg (MethodConfig): Configuration of the series.
        suffix (str): Extra qualifier.

    Returns:
        str: The name.
    """
    name = f"{cfg.method}_ks{cfg.k_s}_kt{cfg.k_t}"
    return f"{name}_{suffix}" if suffix else name


def run_convergence(
    template: MethodConfig,
    prob: ProblemDefinition,
    nref: int,
    *,
    start: int = 0,
    runtime: RuntimeConfig | None = None,
) -> list[StudyRow]:
    """Uniform refinement in the template's direction.

    Args:
        template (MethodConfig): The configuration.
        prob (ProblemDefinition): The problem.
        nref (int): Last refinement level.
        start (int): First refinement level.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        list[StudyRow]: Rows for levels start..nref.
    """
    return run_series(
        template, prob, range(start, nref + 1), series_name(template), runtime=runtime
    )


def run_gamma_study(
    template: MethodConfig,
    prob: ProblemDefinition,
    nref: int,
    *,
    gammas: Sequence[float] = GAMMA_VALUES,
    runtime: RuntimeConfig | None = None,
) -> StudyTable:
    """Convergence for several ghost penalty parameters.

    Args:
        template (MethodConfig): The configuration.
        prob (ProblemDefinition): The problem.
        nref (int): Last refinement level.
        gammas (Sequence[float]): Ghost penalty parameters.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        StudyTable: One series per parameter.
    """
    table: StudyTable = {}
    for gamma in gammas:
        cfg = template.replace(gamma_j=gamma)
        name = series_name(cfg, f"gamma{gamma:g}")
        table[name] = run_series(cfg, prob, range(nref + 1), name, runtime=runtime)
    return table


def run_superconvergence(
    template: MethodConfig,
    prob: ProblemDefinition,
    *,
    i_s: int = 5,
    levels: Sequence[int] = (1, 2, 3, 4),
    runtime: RuntimeConfig | None = None,
) -> list[StudyRow]:
    """Time refinement on a fixed fine mesh.

    The final-time error of DG approaches order k_t + 2 while the space-time
    error keeps order k_t + 1.

    Args:
        template (MethodConfig): The configuration, typically DG (k_t, k_s) = (1, 3).
        prob (ProblemDefinition): The problem.
        i_s (int): Fixed spatial level.
        levels (Sequence[int]): Temporal levels.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        list[StudyRow]: One row per temporal level.
    """
    cfg = template.replace(refine=REFINEMENTS.TIME, i_s=i_s)
    return run_series(cfg, prob, levels, series_name(cfg, "time"), runtime=runtime)


def _nze_methods(k: int) -> list[tuple[METHODS, int]]:
    methods = [(METHODS.DG, k), (METHODS.CG, k), (METHODS.CGBOX, k)]
    if k == 3:  # noqa: PLR2004
        methods.append((METHODS.GCC, k))
    return methods


def run_nze_study(
    prob: ProblemDefinition,
    *,
    ks: Sequence[int] = (1, 2, 3),
    i_s: int = 2,
    i_ts: Sequence[int] = (1, 3, 5),
    eps_f: float = 1.1,
    gamma_j: float | None = None,
    runtime: RuntimeConfig | None = None,
) -> StudyTable:
    """Matrix non-zeros of all methods on a fixed mesh.

    GCC only exists for k = 3. Rows are keyed by the temporal level and carry
    nze_min, nze_max and the errors.

    Args:
        prob (ProblemDefinition): The problem.
        ks (Sequence[int]): Orders k = k_s = k_t.
        i_s (int): Fixed spatial level.
        i_ts (Sequence[int]): Temporal levels.
        eps_f (float): Extension factor.
        gamma_j (float | None): Ghost penalty parameter; the configured
            default if None.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        StudyTable: One series per method and order.
    """
    runtime = runtime or get_config()
    gamma = runtime.DEFAULTS.gamma_j if gamma_j is None else gamma_j
    table: StudyTable = {}
    for k in ks:
        for method, k_t in _nze_methods(k):
            cfg = MethodConfig(
                method=method,
                k_s=k,
                k_t=k_t,
                eps_f=eps_f,
                gamma_j=gamma,
                refine=REFINEMENTS.TIME,
                i_s=i_s,
            )
            name = series_name(cfg, "nze")
            table[name] = run_series(cfg, prob, i_ts, name, runtime=runtime)
    return table


def run_epsf_study(
    prob: ProblemDefinition,
    *,
    ks: Sequence[int] = (1, 2, 3),
    eps_values: Sequence[float] = EPS_F_VALUES,
    i_s: int = 2,
    i_t: int = 2,
    runtime: RuntimeConfig | None = None,
) -> StudyTable:
    """Matrix non-zeros of CG and CG box over the extension factor.

    DG does not depend on the factor and is run once per order as the
    reference. Rows are keyed by the factor; factors violating the
    extension constraint are left out.

    Args:
        prob (ProblemDefinition): The problem.
        ks (Sequence[int]): Orders k = k_s = k_t.
        eps_values (Sequence[float]): Extension factors.
        i_s (int): Fixed spatial level.
        i_t (int): Fixed temporal level.
        runtime (RuntimeConfig | None): Tolerances.

    Returns:
        StudyTable: One series per method and order.
    """
    table: StudyTable = {}
    for k in ks:
        base = MethodConfig(k_s=k, k_t=k, i_s=i_s, i_t=i_t)
        reference = march(base, prob, runtime=runtime).report
        table[series_name(base, "epsf")] = [
            StudyRow(series=series_name(base, "epsf"), i=eps, report=reference)
            for eps in eps_values
        ]
        for method in (METHODS.CG, METHODS.CGBOX):
            name = series_name(base.replace(method=method), "epsf")
            rows: list[StudyRow] = []
            for eps in eps_values:
                cfg = base.replace(method=method, eps_f=eps)
                try:
                    report = march(cfg, prob, runtime=runtime).report
                except ExtensionConstraintError:
                    continue
                rows.append(StudyRow(series=name, i=eps, report=report))
            table[name] = rows
    return table


def run_tint_comparison(
    prob: ProblemDefinition,
    *,
    k: int = 4,
    levels: Sequence[int] = (2, 3, 4, 5),
    gamma_j: float = 0.05,
    tiny_gamma: float = TINY_GAMMA,
    runtime: RuntimeConfig | None = None,
) -> StudyTable:
    """Topology-preserving against topology-insensitive time integration.

    Space is refined with one slab level fixed. The topology-insensitive
    variants run with a vanishing ghost penalty so that integration errors
    are not hidden by the stabilisation: plain, doubled temporal exactness
    and ten uniform substeps. Singular systems are not rejected; their
    errors are reported as infinite.

    Args:
        prob (ProblemDefinition): The problem, typically the polynomial test.
        k (int): Order k = k_s = k_t = q_s = q_t.
        levels (Sequence[int]): Spatial levels.
        gamma_j (float): Ghost penalty of the topology-preserving run.
        tiny_gamma (float): Ghost penalty of the topology-insensitive runs.
        runtime (RuntimeConfig | None): Tolerances; the pivot check is
            switched off.

    Returns:
        StudyTable: One series per variant.
    """
    runtime = runtime or get_config()
    solver = SolverConfig.model_validate(
        runtime.SOLVER.model_dump() | {"pivot_tolerance": 0.0}
    )
    runtime = runtime.model_copy(update={"SOLVER": solver})
    base = MethodConfig(k_s=k, k_t=k, refine=REFINEMENTS.SPACE, i_t=0, gamma_j=gamma_j)
    variants = {
        "preserve": base,
        "insensitive": base.replace(tint=TIME_RULES.INSENSITIVE, gamma_j=tiny_gamma),
        "insensitive_double": base.replace(
            tint=TIME_RULES.INSENSITIVE, gamma_j=tiny_gamma, order_factor=2
        ),
        "insensitive_substeps10": base.replace(
            tint=TIME_RULES.INSENSITIVE, gamma_j=tiny_gamma, substeps=10
        ),
    }
    return {
        series_name(cfg, variant): run_series(
            cfg, prob, levels, series_name(cfg, variant), runtime=runtime
        )
        for variant, cfg in variants.items()
    }
