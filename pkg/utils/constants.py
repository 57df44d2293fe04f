"""
Application Constants
"""

# Systems compared in a regime
SYSTEM_FULL = "full"
SYSTEM_REDUCED = "reduced"
SYSTEM_ZERO_ORDER = "zero_order"
SYSTEMS = (SYSTEM_FULL, SYSTEM_REDUCED, SYSTEM_ZERO_ORDER)
REDUCED_VARIANTS = (SYSTEM_REDUCED, SYSTEM_ZERO_ORDER)

# Integration plans carried by a regime
PLAN_FAST = "fast"
PLAN_X_STAR = "x_star"
PLAN_NAMES = (PLAN_FAST, PLAN_X_STAR) + SYSTEMS

# Diagnostics
DIAG_PDF = "pdf"
DIAG_ACF = "acf"
DIAG_CCF = "ccf"
DIAG_KCF = "kcf"
DIAGNOSTICS = (DIAG_PDF, DIAG_ACF, DIAG_CCF, DIAG_KCF)

DIAGNOSTIC_TITLES = {
    DIAG_PDF: "L2 errors between the PDFs of the slow variables",
    DIAG_ACF: "L2 errors between the time autocorrelation functions",
    DIAG_CCF: "L2 errors between the time cross-correlation functions",
    DIAG_KCF: "L2 errors between the energy autocorrelation functions",
}

# Table column labels
VARIANT_LABELS = {
    SYSTEM_REDUCED: "Red.",
    SYSTEM_ZERO_ORDER: "Z.O.",
}

# x* estimation modes
X_STAR_ZERO = "zero"
X_STAR_FULL_MEAN = "full_mean"
X_STAR_FILE = "file"
X_STAR_MODES = (X_STAR_ZERO, X_STAR_FULL_MEAN, X_STAR_FILE)

# Trajectory file formats
TRAJECTORY_NPZ = "npz"
TRAJECTORY_CSV = "csv"
TRAJECTORY_FORMATS = (TRAJECTORY_NPZ, TRAJECTORY_CSV)

# Pipeline stages
STAGE_CALIBRATE = "calibrate"
STAGE_X_STAR = "x_star"
STAGE_CLOSURE = "closure"
STAGE_INTEGRATE = "integrate"
STAGE_DIAGNOSE = "diagnose"
STAGE_PERSIST = "persist"

# Seed streams split from a regime's master seed, in spawn order
SEED_STREAMS = (
    PLAN_X_STAR,
    PLAN_FAST,
    SYSTEM_FULL,
    SYSTEM_REDUCED,
    SYSTEM_ZERO_ORDER,
)

# Suite profiles
PROFILE_DESK = "desk"
PROFILE_FULL = "full"

# Output file names
CLOSURE_FILE = "closure.json"
SUMMARY_FILE = "summary.json"
TIMINGS_FILE = "timings.json"
RESPONSE_COLUMNS_FILE = "response_columns.csv"
CURVES_DIR = "curves"
CALIBRATION_DIR = "calibration"
SUITE_SUMMARY_FILE = "suite_summary.json"
TABLES_TEXT_FILE = "tables.txt"
TABLES_CSV_FILE = "tables.csv"

# Messages
MSG_STAGE_DONE = "Stage '{stage}' finished in {seconds:.1f}s"
MSG_REGIME_FAILED = "Regime {regime} failed: {error}"
