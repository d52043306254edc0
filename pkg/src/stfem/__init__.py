#
# Copyright (C) 2025 National Institute of Informatics.
#

"""Higher order unfitted space-time finite elements on moving 1D domains."""
