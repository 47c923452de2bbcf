"""Numeric tolerances and size guards shared by every module."""

import math

# density matrices
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
SINGULAR_VALUE_SLACK = 1e-10
EIGEN_CLAMP = 1e-12
PROBABILITY_SUM_TOL = 1e-10

# closed forms
SINGULAR_RADIUS = 1e-8
P_HALF = 0.5
P_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# root finding
BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 200

CLASSICAL_LIMIT = 2.0 / 3.0

# enumeration guards
MAX_SYMMETRIC_ENUM_DEPTH = 11
MAX_ENUM_NODES = 2 ** (MAX_SYMMETRIC_ENUM_DEPTH + 1) - 1
MAX_EXHAUSTIVE_EDGES = 24
MAX_INCIDENCE_CELLS = 50_000_000
PLACEMENT_BLOCK = 4096
EXHAUSTIVE_DEFAULT_EDGES = 14
# trees whose pair arrays and incidence matrices stay cached
TREE_CACHE_SIZE = 4

MIN_ASYMPTOTIC_SAMPLES = 4

CSV_DIGITS = 17
TABLE_DIGITS = 4
