"""Numerical tolerances shared across the package.

The values separate exact-algebra residuals (around 1e-14 for D <= 64)
from genuine violations.
"""

TOL_NORM = 1e-10
TOL_PSD = 1e-10
# relative to the largest singular value
TOL_RANK = 1e-8
TOL_EPS = 1e-12
TOL_TANGLE = 1e-8

# alternating least squares defaults
TOL_ALS = 1e-9
ALS_RESTARTS = 64
ALS_MAX_ITER = 500
ALS_NORM_CAP = 1e6

# dual bases are refused above this condition number
MAX_CONDITION = 1e12
