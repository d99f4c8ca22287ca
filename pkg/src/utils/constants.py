"""
Switching Options - Constants
=============================
Tolerances, labels and file-format constants in one place
"""

# ==================== NUMERICAL TOLERANCES ====================

# Root finding
ROOT_XTOL = 1e-14
ROOT_MAXITER = 200
BRACKET_FACTOR = 2.0
BRACKET_MAX_EXPANSIONS = 60
# The expansion factor squares after this many steps (2, 4, 16, 256)
BRACKET_ACCELERATE_EVERY = 15
# Brent runs once the bracket ends are within this factor
GEOMETRIC_RATIO = 2.0

# Acceptance thresholds
RESIDUAL_TOL = 1e-10
PASTING_TOL = 1e-8
HJB_TOL = 1e-8
CONSISTENCY_TOL = 1e-9

# Grid points closer than this (relative) to a boundary or step are nudged off it
GRID_OFFSET = 1e-9
DEFAULT_GRID_POINTS = 1000


# ==================== CASES & REGIONS ====================

CASE_IDS = ("I1", "I2", "I3", "II1", "II2", "II3", "III1", "III2")

# Mode 1 (open)
REGION_PRODUCTION = "P"
REGION_SWITCH_OUT = "S_out"
REGION_ABANDON_OPEN = "A1"

# Mode 0 (closed)
REGION_WAITING = "W"
REGION_SWITCH_IN = "S_in"
REGION_ABANDON_CLOSED = "A0"

OPEN_REGIONS = (REGION_PRODUCTION, REGION_SWITCH_OUT, REGION_ABANDON_OPEN)
CLOSED_REGIONS = (REGION_WAITING, REGION_SWITCH_IN, REGION_ABANDON_CLOSED)


# ==================== HJB CLAUSES ====================

OPEN_CLAUSES = ("open_generator", "open_switch_out", "open_abandon")
CLOSED_CLAUSES = ("closed_generator", "closed_switch_in", "closed_abandon")
HJB_CLAUSES = OPEN_CLAUSES + CLOSED_CLAUSES


# ==================== MONTE CARLO ====================

# Expected overshoot of a discretely monitored Brownian level, in units of the step std
DISCRETE_MONITORING_SHIFT = 0.5826
MIN_HORIZON_STEPS = 100


# ==================== FILE FORMATS ====================

SIGNIFICANT_DIGITS = 17
SAMPLE_CSV_HEADER = ("x", "w1", "w0", "dw1", "dw0", "region1", "region0")
RESIDUAL_CSV_HEADER = ("x",) + HJB_CLAUSES


# ==================== EXIT CODES ====================

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_SOLVER_FAILURE = 3
