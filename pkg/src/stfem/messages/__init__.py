#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Provides messages used in the space-time solver."""

# ruff: noqa: N812

from . import error as E, info as I, warning as W
