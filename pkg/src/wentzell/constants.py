"""Numerical constants used throughout the wentzell package."""

# Mollifier quadrature (Gauss-Legendre nodes per smooth subinterval)
MOLLIFIER_NODES = 200
MOLLIFIER_NORMALIZATION_TOL = 1e-12

# Newton iteration for the backward Euler step
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 25
LINE_SEARCH_MAX_HALVINGS = 8

# Coercivity / embedding eigenproblems
DENSE_EIGEN_LIMIT = 200
EIGEN_TOL = 1e-10
EIGEN_MAX_ITER = 5000

# Hypothesis sampling
HYPOTHESIS_RANGE = (-10.0, 10.0)
HYPOTHESIS_SAMPLES = 2001

# Brute-force oracles
ORACLE_SAMPLES = 100_000
ORACLE_WINDOWS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
ORACLE_STEPS = (1e-4, 1e-5, 1e-6)
ORACLE_GRID = 81

# Verification defaults
ENERGY_TOL = 1e-10
INCLUSION_FACTOR = 10.0
INCLUSION_FLOOR = 1e-8
INCLUSION_MIN_FRACTION = 0.99
WINDOW_SAMPLES = 129
HVI_FACTOR = 10.0
HVI_TEST_FUNCTIONS = 50
APRIORI_MAX_RATIO = 4.0
COERCIVITY_SAMPLES = 100
# Relative slack when checking sampled Rayleigh quotients against M
CERTIFY_TOL = 1e-10

# Output
FLOAT_FORMAT = "%.17g"
REPORT_SCHEMA_VERSION = 1
