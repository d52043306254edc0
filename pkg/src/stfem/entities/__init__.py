#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Models for run configuration and results."""
