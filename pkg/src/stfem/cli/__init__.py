#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Command-line interface."""
