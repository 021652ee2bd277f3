"""Configuration settings for the discriminantal TC toolkit."""

import os

# Derivatives, signatures and flows
GRAD_TOL = 1e-8
NULL_TOL = 1e-9
FD_STEP = 1e-5
FD_TOL = 1e-5
MAX_STEPS = 100000
ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60
MAX_TRIAL_STEP = 10.0
SAFETY_FACTOR = 0.5  # |Δ| may shrink to at most this fraction of its value per step
# A flow whose best f̃ and best |grad| both stop improving for PLATEAU_STEPS
# accepted steps has reached floating-point resolution
PLATEAU_STEPS = 200
PLATEAU_RTOL = 1e-14
PLATEAU_GRAD_RATIO = 0.9
PLATEAU_GRAD_FACTOR = 100.0

# Sampling points of V
SAMPLE_DELTA_FLOOR = 0.1
MAX_SAMPLE_ATTEMPTS_FACTOR = 50

# Enumeration and expansion caps
MAX_PATTERN_DIM = 20
MAX_DISC_F_N = 6
MAX_PLANNER_N = 4

# Configuration spaces
CENTRED_TOL = 1e-12
ROOT_RESIDUAL_TOL = 1e-9
ROOT_MARGIN_MIN = 1e-10
ROOT_MAX_ITER = 500
ACHIEVABILITY_TRIALS = 8
ACHIEVABILITY_RANGE = 10**6
SCALING_TRIALS = 20
SCALING_TOL = 1e-9

# Planner
PLANNER_GRAD_TOL = 1e-8
CONTINUITY_STEP = 0.05
MATCH_TOL = 1e-3
ENDPOINT_TOL = 1e-6
AUDIT_DENSITY = 10
RETRACTION_SAMPLES = 20
ROTATION_STEP = 0.02  # radians per sample on a rotation leg
RECIPE_SAMPLES = 400
RECIPE_ATTEMPTS = 12
RECIPE_MARGIN_FLOOR = 1e-3
CATALOG_SEEDS = 24
SHAPE_DEDUP_TOL = 1e-6
HESSIAN_LABEL_TOL = 1e-5

# CLI exit codes
EXIT_CODES = {
    "ok": 0,
    "parse": 2,
    "validation": 3,
    "numeric": 4,
}

POTENTIALS = ("g", "gprime")


def max_workers() -> int:
    """Worker-thread cap, read from DISC_TC_THREADS (defaults to the CPU count)."""
    raw = os.getenv("DISC_TC_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        value = os.cpu_count() or 1
    return max(1, value)


def debug_mode() -> bool:
    return os.getenv("DEBUG_MODE", "false").lower() == "true"
