#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Provides common configuration for run records."""

from pydantic import ConfigDict


forbid_extra_config = ConfigDict(
    extra="forbid",
    validate_assignment=True,
)
"""Common configuration dict to forbid extra fields.

- extra: "forbid" - Forbids extra fields not defined in the model.
- validate_assignment: True - Validates fields on assignment.
"""


frozen_config = ConfigDict(
    frozen=True,
    use_enum_values=False,
)
"""Common configuration dict for immutable records.

- frozen: True - Instances are hashable and reject assignment.
- use_enum_values: False - Enum fields keep their enum members.
"""
