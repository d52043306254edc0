#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Model for the configuration of a single run."""

import typing as t

from pydantic import BaseModel, Field, model_validator

from stfem.const import (
    DEFAULT_EPS_F,
    DEFAULT_GAMMA_J,
    METHODS,
    REFINEMENTS,
    TIME_RULES,
)
from stfem.fem.quadrature import QuadratureOptions

from .common import forbid_extra_config, frozen_config


class MethodConfig(BaseModel):
    """Discretisation parameters of a run.

    ``k = r`` in study tables means ``k_s = k_t = r``; geometry orders
    default to the discretisation orders.
    """

    method: METHODS = METHODS.DG
    """Time discretisation."""

    k_s: t.Annotated[int, Field(ge=1)] = 1
    """Spatial polynomial order."""

    k_t: t.Annotated[int, Field(ge=0)] = 1
    """Temporal polynomial order."""

    q_s: t.Annotated[int, Field(ge=1)]
    """Spatial geometry order."""

    q_t: t.Annotated[int, Field(ge=0)]
    """Temporal geometry order."""

    gamma_j: t.Annotated[float, Field(ge=0)] = DEFAULT_GAMMA_J
    """Ghost penalty parameter."""

    eps_f: t.Annotated[float, Field(ge=1)] = DEFAULT_EPS_F
    """Extension factor of the CG strip."""

    tint: TIME_RULES = TIME_RULES.PRESERVE
    """Space-time quadrature strategy."""

    substeps: t.Annotated[int, Field(ge=1)] = 1
    """Uniform time substeps of the topology-insensitive rule."""

    order_factor: t.Annotated[int, Field(ge=1)] = 1
    """Multiplier of the temporal exactness of the space-time rule."""

    refine: REFINEMENTS = REFINEMENTS.BOTH
    """Refinement direction of a study."""

    i_s: t.Annotated[int, Field(ge=0)] = 0
    """Spatial refinement level, h = 0.5^(i_s + 1)."""

    i_t: t.Annotated[int, Field(ge=0)] = 0
    """Temporal refinement level, dt = 0.5 * 2^(-i_t - 1)."""

    model_config = forbid_extra_config | frozen_config
    """Configure to forbid extra fields and freeze instances."""

    @model_validator(mode="before")
    @classmethod
    def _default_geometry_orders(cls, data: t.Any) -> t.Any:  # noqa: ANN401
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("q_s") is None:
            data["q_s"] = data.get("k_s", 1)
        if data.get("q_t") is None:
            data["q_t"] = data.get("k_t", 1)
        return data

    @model_validator(mode="after")
    def _check_method_orders(self) -> t.Self:
        if self.method is METHODS.GCC and self.k_t != 3:  # noqa: PLR2004
            error = f"GCC uses the cubic Hermite basis, k_t must be 3, got {self.k_t}."
            raise ValueError(error)
        if self.method in {METHODS.CG, METHODS.CGBOX} and self.k_t < 1:
            error = f"Continuous methods need k_t >= 1, got {self.k_t}."
            raise ValueError(error)
        return self

    @property
    def label(self) -> str:
        """Short description used in run labels."""
        return (
            f"{self.method}/k=({self.k_s},{self.k_t})/q=({self.q_s},{self.q_t})"
            f"/i=({self.i_s},{self.i_t})"
        )

    @property
    def quadrature(self) -> QuadratureOptions:
        """Space-time quadrature options of the configuration."""
        return QuadratureOptions(
            mode=self.tint, substeps=self.substeps, order_factor=self.order_factor
        )

    def level(self, i: int) -> t.Self:
        """Configuration at refinement level i in the refinement direction.

        Args:
            i (int): Refinement level.

        Returns:
            Self: A copy with the refined level(s) set to i.
        """
        match self.refine:
            case REFINEMENTS.BOTH:
                update = {"i_s": i, "i_t": i}
            case REFINEMENTS.SPACE:
                update = {"i_s": i}
            case REFINEMENTS.TIME:
                update = {"i_t": i}
        return self.replace(**update)

    def replace(self, **update: t.Any) -> t.Self:  # noqa: ANN401
        """Validated copy with some fields replaced.

        Args:
            **update (Any): Fields to replace.

        Returns:
            Self: The new configuration.

        Raises:
            ValidationError: If the updated configuration is invalid.
        """
        return self.model_validate(self.model_dump() | update)
