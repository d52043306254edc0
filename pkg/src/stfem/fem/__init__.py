#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Discretisation building blocks: mesh, geometry, quadrature, spaces, forms."""
