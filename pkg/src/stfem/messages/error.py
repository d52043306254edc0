#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Provides error log messages used in the space-time solver."""

from .base import LogMessage


EXTENSION_VIOLATED = LogMessage(
    "E000",
    "Extension constraint violated on slab %(n)s with eps_f=%(eps_f)s; "
    "increase eps_f.",
)

SINGULAR_SYSTEM = LogMessage(
    "E001",
    "Slab %(n)s system is numerically singular with gamma_J=%(gamma_j)s.",
)

RUN_ABORTED = LogMessage(
    "E002",
    "Run aborted: %(error)s",
)
