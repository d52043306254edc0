#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Models for run errors and study table rows."""

import math
import typing as t

from pydantic import BaseModel, Field, field_validator

from .common import forbid_extra_config, frozen_config


type NonNegative = t.Annotated[float, Field(ge=0)]


class ErrorReport(BaseModel):
    """Errors and cost figures of a run."""

    l2_final: NonNegative
    """L2 error at the final time on the discrete domain."""

    l2l2: NonNegative
    """Space-time L2(L2) error over the whole run."""

    geom_dist: NonNegative
    """Largest distance between discrete and exact boundary points."""

    nze_min: t.Annotated[int, Field(ge=0)]
    """Fewest non-zero matrix entries of any slab."""

    nze_max: t.Annotated[int, Field(ge=0)]
    """Most non-zero matrix entries of any slab."""

    wall: NonNegative
    """Wall time in seconds."""

    deform_jump: NonNegative = 0.0
    """Largest jump of the deformation across slab interfaces."""

    model_config = forbid_extra_config | frozen_config
    """Configure to forbid extra fields and freeze instances."""

    @field_validator("l2_final", "l2l2", "geom_dist", "deform_jump", mode="before")
    @classmethod
    def _nan_is_infinite(cls, value: float) -> float:
        # failed solves without a singularity check yield nan errors
        return math.inf if isinstance(value, float) and math.isnan(value) else value


class StudyRow(BaseModel):
    """One row of a study table."""

    series: str
    """Name of the series the row belongs to."""

    i: float
    """Refinement level, or the swept parameter value."""

    report: ErrorReport
    """Errors of the run."""

    model_config = forbid_extra_config | frozen_config
    """Configure to forbid extra fields and freeze instances."""

    def columns(self) -> tuple[float, ...]:
        """Values in the order of the study output columns.

        Returns:
            tuple[float, ...]: i, l2_final, l2l2, nze_max, wall, geom_dist.
        """
        report = self.report
        return (
            self.i,
            report.l2_final,
            report.l2l2,
            float(report.nze_max),
            report.wall,
            report.geom_dist,
        )
