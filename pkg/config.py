"""
Global Configuration for L96 CLOSURE

Numerical defaults for the two-scale Lorenz 96 closure toolkit. Every value
here can be overridden per regime through the JSON regime files; the few
environment overrides below are optional.
"""

from pathlib import Path

from decouple import config as env

# Application Info
APP_NAME = "L96 CLOSURE"
APP_VERSION = "1.0.0"

# Paths
BASE_DIR = Path(__file__).resolve().parent
LOGS_DIR = BASE_DIR / "logs"
REGIMES_DIR = BASE_DIR / "regimes"
RESULTS_DIR = Path(env("RESULTS_DIR", default=str(BASE_DIR / "results")))

# Logging
LOG_LEVEL = env("LOG_LEVEL", default="INFO")
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10MB
LOG_BACKUP_COUNT = 5

# Suite execution
DEFAULT_JOBS = env("DEFAULT_JOBS", default=1, cast=int)

# Model geometry (reference regimes)
DEFAULT_N_X = 20
DEFAULT_J = 4
DEFAULT_EPS = 0.01

# Calibration protocol
CALIBRATION_N = 40
CALIBRATION_T_TOTAL = 10000.0
CALIBRATION_DT = 5e-3
CALIBRATION_SPIN_UP = 100.0
CALIBRATION_SAMPLE_EVERY = 10
CALIBRATION_PERTURBATION = 0.5
MIN_BETA = 1e-3

# Integration steps
FULL_MODEL_DT = 1e-4
FAST_MODEL_DT = 5e-3
SLOW_MODEL_DT = 5e-3
STATS_SPIN_UP = 100.0
INITIAL_PERTURBATION = 0.5

# Closure windows
T_AV = 10000.0
T_CORR = 50.0
ACCUMULATOR_BLOCK = 4096

# Statistics
SAMPLE_SPACING = 0.05
T_STATS_DESK = 5000.0
T_STATS_FULL = 10000.0
CORRELATION_WINDOW = 20.0
PDF_LO = -5.0
PDF_HI = 5.0
PDF_BINS = 200
MAX_OUT_OF_RANGE_FRACTION = 1e-3

# x* estimation
X_STAR_DURATION = 2000.0

# Output
CSV_FLOAT_FORMAT = "%.17g"

# Fast-trajectory diagnostics keep only this leading span of the closure run
FAST_DIAGNOSTIC_DURATION = 1000.0
