import os

# OUTPUT_ROOT is used to
# 1. place run directories when the CLI gets no --out
# 2. resolve relative --out paths
OUTPUT_ROOT = os.getenv("TRASONET_OUTPUT_ROOT") or "./trasonet-out"
LOG_LEVEL = (os.getenv("TRASONET_LOG_LEVEL") or "INFO").upper()
MAX_WORKERS = int(os.getenv("TRASONET_MAX_WORKERS") or 4)

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"

CSV_FLOAT_FORMAT = "%.6f"

# sensing
MAP_MATCH_RADIUS_M = 50.0

# completion
RIDGE = 1e-6
RELATIVE_ERROR_GUARD_KMH = 1.0
# lines observed fewer than this many times the rank are held to their initialization fill
SPARSE_OBSERVATIONS_PER_RANK = 2
SPARSE_FILL_WEIGHT = 0.1

# ahp
POWER_ITERATION_TOL = 1e-12
POWER_ITERATION_MAX = 10_000
RECIPROCITY_TOL = 1e-9
CONSISTENCY_THRESHOLD = 0.1
# mean of the uniform speed law as a share of the limit
NOMINAL_SPEED_SHARE = 0.5
CONGESTION_BOUNDS = (0.5, 4.0)
# Saaty's random consistency index
RANDOM_INDEX = {
    1: 0.0,
    2: 0.0,
    3: 0.58,
    4: 0.90,
    5: 1.12,
    6: 1.24,
    7: 1.32,
    8: 1.41,
    9: 1.45,
}

# access
SPEED_RANGE_KMH = 80.0
KB_CAPACITY = 1_000
DEFAULT_QOS = 0.5
LEVEL_H = 0.9
LEVEL_M = 0.6
LEVEL_L = 0.3

# netsim
VOICE_RATE_MBPS = 0.0006
VIDEO_RATE_MBPS = 5.0
VOICE_MEAN_DURATION_S = 180.0
VIDEO_MEAN_DURATION_S = 300.0
VOICE_DELAY_BOUND_MS = 100.0
VIDEO_DELAY_BOUND_MS = 150.0
SUCCESS_DURATION_SHARE = 0.95
DENSITY_BIN_EDGES = (0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, float("inf"))
