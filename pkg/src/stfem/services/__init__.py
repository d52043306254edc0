#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Services driving slab marching and the convergence studies."""
