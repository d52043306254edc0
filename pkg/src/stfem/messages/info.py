#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Provides informational log messages used in the space-time solver."""

from .base import LogMessage


RUN_STARTED = LogMessage(
    "I000",
    "Started %(method)s run on %(problem)s with %(n_slabs)s slabs "
    "and %(n_elements)s elements.",
)

SLAB_SOLVED = LogMessage(
    "I001",
    "Solved slab %(n)s: %(unknowns)s unknowns, %(nze)s non-zero entries, "
    "%(cut)s cut elements.",
)

RUN_FINISHED = LogMessage(
    "I002",
    "Finished run: l2_final=%(l2_final).3e, l2l2=%(l2l2).3e, "
    "geom_dist=%(geom_dist).3e, nze_max=%(nze_max)s in %(wall).2fs.",
)

STUDY_ROW = LogMessage(
    "I003",
    "Level %(i)s of %(series)s: l2_final=%(l2_final).3e, l2l2=%(l2l2).3e.",
)

OBSERVED_ORDERS = LogMessage(
    "I004",
    "Observed orders of %(series)s: %(orders)s",
)

DAT_WRITTEN = LogMessage(
    "I005",
    "Wrote %(rows)s rows to %(path)s.",
)

CONFIG_LOADED = LogMessage(
    "I006",
    "Loaded runtime configuration from %(path)s.",
)
