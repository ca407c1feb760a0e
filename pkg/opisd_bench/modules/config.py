import os

# Define the cache directory relative to the root directory of the package
MODULES_ROOT_DIR = os.path.dirname(__file__)
PROJECT_ROOT_DIR = os.path.abspath(os.path.join(MODULES_ROOT_DIR, '..'))  # Move one level up
CACHE_DIR = os.environ.get("OPISD_CACHE_DIR") or os.path.join(PROJECT_ROOT_DIR, ".cache")

# Power flow
DEFAULT_SLACK_V = 1.0
DEFAULT_PF_TOL = 1e-8
DEFAULT_PF_MAX_ITER = 100

# Penalty factor applied to each violation kind unless the experiment overrides it
DEFAULT_PENALTY = 1e4

# Enumeration
DEFAULT_ENUMERATION_BUDGET = 10_000_000

# Solvers
DEFAULT_SEED = 1
DEFAULT_N_S = 20
DEFAULT_STOP_THRESHOLD = 0.0
MAX_SOLVER_ITERATIONS = 10_000
C0_MAX_ATTEMPTS_PER_WORSENING = 1_000
GA_FITNESS_EPS = 1e-9
PSO_ITERATION_ESTIMATE = 100
OBJECTIVE_CACHE_SIZE = 500_000

# Metrics
DOMINANCE_ATOL = 1e-12
AREA_ATOL = 1e-9
OPTIMUM_ATOL = 1e-9

# Harness
ARCHIVE_VERIFY_FRACTION = 0.1
SAMPLES_FILE = "samples.csv"
MANIFEST_FILE = "manifest.json"
REPORT_JSON_FILE = "report.json"
REPORT_CSV_FILE = "report.csv"
SUMMARY_CSV_FILE = "summary.csv"
DOMINANCE_CSV_FILE = "dominance.csv"
