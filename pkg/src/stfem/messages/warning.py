#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Provides warning log messages used in the space-time solver."""

from .base import LogMessage


TANGENTIAL_SAMPLE_MISMATCH = LogMessage(
    "W000",
    "Sampled level set values of element %(element)s fall below the computed "
    "slab minimum by %(gap).3e.",
)

WEAK_TRANSPORT = LogMessage(
    "W001",
    "Boundary trajectory of %(problem)s deviates from the velocity field by "
    "%(defect).3e at t=%(t).3f.",
)

EMPTY_TRIAL_SPACE = LogMessage(
    "W002",
    "Slab %(n)s has no active elements.",
)
