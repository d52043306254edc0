#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Time marching over the slabs of a run and its error metrics."""

from __future__ import annotations

import time
import typing as t

from dataclasses import dataclass, field, replace

import numpy as np

from stfem.config import get_config
from stfem.const import METHODS
from stfem.entities.error_report import ErrorReport
from stfem.exc import ExtensionConstraintError
from stfem.fem.assembly import assemble_slab
from stfem.fem.deform import (
    build_slab_deformation,
    deformation_jump,
    interpolate_initial,
    map_on_element,
    transfer_continuous,
    transfer_elementwise,
    transfer_time_derivative,
)
from stfem.fem.dofs import build_dof_table
from stfem.fem.levelset import interpolate_levelset
from stfem.fem.mesh import build_mesh, build_slabs
from stfem.fem.quadrature import fixed_time_cut_rule, st_rule_topology_preserving
from stfem.fem.regions import build_regions, check_extension_constraint
from stfem.fem.solver import solve_slab
from stfem.fem.spaces import build_slab_space, eval_on_element
from stfem.logger import logger, run_context
from stfem.messages import E, I, W


if t.TYPE_CHECKING:
    from stfem.config import RuntimeConfig
    from stfem.entities.method_config import MethodConfig
    from stfem.fem.deform import SlabDeformation
    from stfem.fem.dofs import SpatialDofTable
    from stfem.fem.levelset import LevelSetSlab, ProblemDefinition
    from stfem.fem.mesh import BackgroundMesh, TimeSlabbing
    from stfem.fem.polynomials import FloatArray
    from stfem.fem.regions import ActiveRegions
    from stfem.fem.spaces import SlabSpace


_CONTINUOUS = frozenset({METHODS.CG, METHODS.CGBOX, METHODS.GCC})

GEOMETRY_SAMPLES = 5
"""Sampled times per slab of the geometry distance."""


@dataclass(frozen=True, eq=False)
class SlabRecord:
    """State of one solved slab."""

    n: int
    unknowns: int
    nze: int
    n_cut: int
    constrained_layers: tuple[int, ...]

    initial: FloatArray | None = field(repr=False)
    """Data of the constrained layers, (k_t + 1, n_dofs)."""

    coeffs: FloatArray = field(repr=False)
    """Coefficients of the slab solution, (k_t + 1, n_dofs)."""

    space: SlabSpace = field(repr=False)
    deformation: SlabDeformation = field(repr=False)


@dataclass(frozen=True, eq=False)
class MarchResult:
    """Outcome of a run."""

    config: MethodConfig
    problem: str
    report: ErrorReport

    coeffs: FloatArray = field(repr=False)
    """Coefficients of the last slab."""

    space: SlabSpace = field(repr=False)
    deformation: SlabDeformation = field(repr=False)

    records: tuple[SlabRecord, ...] = field(default=(), repr=False)
    """Per-slab states, kept on request."""


def mesh_size(i_s: int) -> float:
    """Mesh size of a spatial level, h = 0.5^(i_s + 1).

    Args:
        i_s (int): Spatial level.

    Returns:
        float: The mesh size.
    """
    return 0.5 ** (i_s + 1)


def time_step(i_t: int) -> float:
    """Slab length of a temporal level, dt = 0.5 * 2^(-i_t - 1).

    Args:
        i_t (int): Temporal level.

    Returns:
        float: The slab length.
    """
    return 0.5 * 2.0 ** (-i_t - 1)


def discretise(
    cfg: MethodConfig, prob: ProblemDefinition
) -> tuple[BackgroundMesh, TimeSlabbing]:
    """Mesh and slabbing of a configuration.

    Args:
        cfg (MethodConfig): The configuration.
        prob (ProblemDefinition): The problem.

    Returns:
        tuple[BackgroundMesh, TimeSlabbing]: Mesh and slabbing.
    """
    lo, hi = prob.domain
    n_el = max(1, round((hi - lo) / mesh_size(cfg.i_s)))
    n_slabs = max(1, round(prob.t_end / time_step(cfg.i_t)))
    return build_mesh(lo, hi, n_el), build_slabs(prob.t_end, n_slabs)


class _Geometry:
    """Level sets and regions of the slabs, computed once each."""

    def __init__(
        self,
        cfg: MethodConfig,
        prob: ProblemDefinition,
        mesh: BackgroundMesh,
        slabs: TimeSlabbing,
        runtime: RuntimeConfig,
    ) -> None:
        self.cfg = cfg
        self.prob = prob
        self.mesh = mesh
        self.slabs = slabs
        self.runtime = runtime
        self._cache: dict[int, tuple[LevelSetSlab, ActiveRegions]] = {}

    def __getitem__(self, n: int) -> tuple[LevelSetSlab, ActiveRegions]:
        if n not in self._cache:
            ls = interpolate_levelset(
                self.prob, self.mesh, self.slabs, n, self.cfg.q_s, self.cfg.q_t
            )
            regions = build_regions(
                ls,
                self.cfg.eps_f,
                self.prob.w_inf,
                sign_tolerance=self.runtime.GEOMETRY.sign_tolerance,
            )
            # slabs before n - 1 are never revisited
            self._cache = {k: v for k, v in self._cache.items() if k >= n - 1}
            self._cache[n] = (ls, regions)
        return self._cache[n]


def _trace(
    coeffs: FloatArray, space: SlabSpace, time_: float
) -> tuple[FloatArray, FloatArray]:
    """Value and time derivative at fixed undeformed position, per element."""
    dofs = space.dofs
    value = space.trial_basis.values(time_) @ coeffs
    slope = space.trial_basis.derivatives(time_) @ coeffs
    return dofs.gather(value), dofs.gather(slope)


def _initial_data(
    cfg: MethodConfig,
    prob: ProblemDefinition,
    dofs: SpatialDofTable,
    space: SlabSpace,
    deformation: SlabDeformation,
    last: tuple[FloatArray, FloatArray, SlabDeformation] | None,
) -> FloatArray:
    """Data of the constrained layers of a continuous method."""
    initial = np.zeros(space.trial_index.shape)
    gcc = cfg.method is METHODS.GCC
    if last is None:
        values, derivs = interpolate_initial(
            deformation, cfg.k_s, prob.u0, prob.u0_dt if gcc else None
        )
    elif gcc:
        values, derivs = transfer_time_derivative(last[0], last[1], last[2], deformation)
    else:
        initial[0] = transfer_continuous(last[0], last[2], deformation, dofs)
        return initial

    initial[0] = dofs.average(values)
    if derivs is not None:
        initial[space.trial_basis.slope_index] = dofs.average(derivs)
    return initial


def _space_time_error(
    coeffs: FloatArray,
    space: SlabSpace,
    deformation: SlabDeformation,
    regions: ActiveRegions,
    prob: ProblemDefinition,
    runtime: RuntimeConfig,
) -> float:
    """Squared L2(L2) error of a slab on its deformed space-time domain."""
    if prob.u_exact is None:
        return 0.0
    ls = deformation.levelset
    mesh = ls.mesh
    order = 2 * space.k_s + deformation.q_s + 2
    total = 0.0
    for element in np.nonzero(regions.elems_e)[0]:
        element = int(element)
        rule = st_rule_topology_preserving(
            ls,
            element,
            space.k_t + 1,
            order,
            merge_tolerance=runtime.GEOMETRY.merge_tolerance,
            root_tolerance=runtime.GEOMETRY.root_tolerance,
        )
        if rule.size == 0:
            continue
        xi = mesh.to_reference(element, rule.x)
        y, jac, _ = map_on_element(deformation, element, xi, rule.t)
        value, _, _ = eval_on_element(coeffs, space, deformation, element, xi, rule.t)
        diff = value - np.asarray(prob.u_exact(y, rule.t))
        total += float(np.sum(rule.weights * jac * diff**2))
    return total


def _final_error(
    coeffs: FloatArray,
    space: SlabSpace,
    deformation: SlabDeformation,
    prob: ProblemDefinition,
) -> float:
    """L2 error on the discrete domain at the end of a slab."""
    if prob.u_exact is None:
        return 0.0
    t_end = deformation.t_hi
    order = 2 * space.k_s + deformation.q_s + 2
    total = 0.0
    for element in range(deformation.mesh.n_elements):
        rule = fixed_time_cut_rule(deformation, element, t_end, order)
        if rule.weights.size == 0:
            continue
        value, _, _ = eval_on_element(coeffs, space, deformation, element, rule.xi, t_end)
        diff = value - np.asarray(prob.u_exact(rule.y, np.full_like(rule.y, t_end)))
        total += float(np.sum(rule.weights * diff**2))
    return float(np.sqrt(total))


def discrete_boundary(deformation: SlabDeformation, time_: float) -> FloatArray:
    """Boundary points of the discrete domain at a time.

    The zeros of phi^lin are mapped by the deformation.

    Args:
        deformation (SlabDeformation): Deformation of the slab.
        time_ (float): Time in the slab.

    Returns:
        FloatArray: Sorted boundary points.
    """
    ls = deformation.levelset
    mesh = ls.mesh
    values = ls.vertex_values(time_)
    a, b = values[:-1], values[1:]
    elements = np.nonzero((a < 0.0) != (b < 0.0))[0]
    if elements.size == 0:
        return np.empty(0)
    s = a[elements] / (a[elements] - b[elements])
    xi = 2.0 * s - 1.0
    y, _, _ = map_on_element(deformation, elements, xi, time_)
    return np.sort(y)


def geometry_distance(
    deformation: SlabDeformation, prob: ProblemDefinition, n_samples: int = GEOMETRY_SAMPLES
) -> float:
    """Largest distance between discrete and exact boundary points in a slab.

    Args:
        deformation (SlabDeformation): Deformation of the slab.
        prob (ProblemDefinition): The problem.
        n_samples (int): Uniformly sampled times including the slab ends.

    Returns:
        float: The distance; 0 for problems without a moving boundary.
    """
    if prob.boundary is None:
        return 0.0
    worst = 0.0
    for time_ in np.linspace(deformation.t_lo, deformation.t_hi, n_samples):
        exact = prob.boundary(float(time_))
        discrete = discrete_boundary(deformation, float(time_))
        if discrete.size == 0:
            return float("inf")
        gaps = np.abs(exact[:, None] - discrete[None, :])
        worst = max(worst, float(gaps.min(axis=1).max()), float(gaps.min(axis=0).max()))
    return worst


def march(
    cfg: MethodConfig,
    prob: ProblemDefinition,
    *,
    runtime: RuntimeConfig | None = None,
    record: bool = False,
) -> MarchResult:
    """Solve all slabs of a run in sequence.

    Args:
        cfg (MethodConfig): The configuration.
        prob (ProblemDefinition): The problem.
        runtime (RuntimeConfig | None): Tolerances; the global configuration
            if None.
        record (bool): Keep the state of every slab.

    Returns:
        MarchResult: Final solution, error report and optional records.

    Raises:
        ExtensionConstraintError: If a continuous method's extension region
            does not cover the active elements.
        SolverError: If a slab system is singular.
    """
    runtime = runtime or get_config()
    geometry_cfg = runtime.GEOMETRY
    options = replace(
        cfg.quadrature,
        merge_tolerance=geometry_cfg.merge_tolerance,
        root_tolerance=geometry_cfg.root_tolerance,
    )
    mesh, slabs = discretise(cfg, prob)
    dofs = build_dof_table(mesh, cfg.k_s)
    geometry = _Geometry(cfg, prob, mesh, slabs, runtime)

    with run_context(f"{prob.name}/{cfg.label}"):
        logger.info(
            I.RUN_STARTED,
            {
                "method": cfg.method,
                "problem": prob.name,
                "n_slabs": slabs.n_slabs,
                "n_elements": mesh.n_elements,
            },
        )
        start = time.perf_counter()
        records: list[SlabRecord] = []
        nzes: list[int] = []
        l2l2 = geom_dist = deform_jump = 0.0
        last: tuple[FloatArray, FloatArray, SlabDeformation] | None = None

        for n in range(1, slabs.n_slabs + 1):
            ls, regions = geometry[n]
            t_lo, t_hi = ls.t_lo, ls.t_hi
            if cfg.method in _CONTINUOUS:
                upcoming = geometry[n + 1][1].elems_e if n < slabs.n_slabs else None
                if not check_extension_constraint(regions, upcoming):
                    logger.error(E.EXTENSION_VIOLATED, {"n": n, "eps_f": cfg.eps_f})
                    error = (
                        f"Extension region of slab {n} does not cover the active "
                        f"elements with eps_f={cfg.eps_f}; increase eps_f."
                    )
                    raise ExtensionConstraintError(error)
            if not regions.elems_e.any():
                logger.warning(W.EMPTY_TRIAL_SPACE, {"n": n})

            deformation = build_slab_deformation(
                ls,
                regions,
                tol=geometry_cfg.newton_tolerance,
                max_iter=geometry_cfg.newton_max_iterations,
            )
            space = build_slab_space(cfg.method, cfg.k_s, cfg.k_t, regions, dofs, t_lo, t_hi)

            initial = previous = None
            if cfg.method is METHODS.DG:
                if last is not None:
                    previous = transfer_elementwise(last[0], last[2], deformation)
            else:
                initial = _initial_data(cfg, prob, dofs, space, deformation, last)

            system = assemble_slab(
                space,
                deformation,
                regions,
                prob,
                gamma_j=cfg.gamma_j,
                options=options,
                initial=initial,
                previous=previous,
                workers=runtime.SOLVER.assembly_workers,
            )
            solution = solve_slab(
                system,
                pivot_tolerance=runtime.SOLVER.pivot_tolerance,
                gamma_j=cfg.gamma_j,
                slab_index=n,
            )
            coeffs = space.reconstruct(solution, initial)
            logger.debug(
                I.SLAB_SOLVED,
                {"n": n, "unknowns": system.size, "nze": system.nze, "cut": regions.n_cut},
            )

            nzes.append(system.nze)
            l2l2 += _space_time_error(coeffs, space, deformation, regions, prob, runtime)
            geom_dist = max(geom_dist, geometry_distance(deformation, prob))
            if last is not None:
                deform_jump = max(deform_jump, deformation_jump(last[2], deformation))
            if record:
                records.append(
                    SlabRecord(
                        n=n,
                        unknowns=system.size,
                        nze=system.nze,
                        n_cut=regions.n_cut,
                        constrained_layers=space.constrained_layers,
                        initial=initial,
                        coeffs=coeffs,
                        space=space,
                        deformation=deformation,
                    )
                )
            values, slopes = _trace(coeffs, space, t_hi)
            last = (values, slopes, deformation)

        report = ErrorReport(
            l2_final=_final_error(coeffs, space, deformation, prob),
            l2l2=float(np.sqrt(l2l2)),
            geom_dist=geom_dist,
            nze_min=min(nzes),
            nze_max=max(nzes),
            wall=time.perf_counter() - start,
            deform_jump=deform_jump,
        )
        logger.info(
            I.RUN_FINISHED,
            {
                "l2_final": report.l2_final,
                "l2l2": report.l2l2,
                "geom_dist": report.geom_dist,
                "nze_max": report.nze_max,
                "wall": report.wall,
            },
        )

    return MarchResult(
        config=cfg,
        problem=prob.name,
        report=report,
        coeffs=coeffs,
        space=space,
        deformation=deformation,
        records=tuple(records),
    )
