"""Constants for omega-combing."""

import math

PROJECT = "omega-combing"

CONF_P = "p"
CONF_CALIBRATION = "calibration"
CONF_RADIUS = "radius"
CONF_STEP = "step"
CONF_SEED = "seed"
CONF_OUT = "out"
CONF_WORKERS = "workers"
CONF_PAIR_ATTEMPTS = "pair_attempts"

DEFAULT_P = 2
DEFAULT_RADIUS = 3
DEFAULT_STEP = 0.05
DEFAULT_SEED = 0
DEFAULT_OUT = "."
DEFAULT_WORKERS = 4
DEFAULT_PAIR_ATTEMPTS = 50

# Extra attempts, each with a fresh child seed, for a trial whose random
# inputs could not be generated.
DEFAULT_TRIAL_RETRIES = 3

# Height B of the horocircle cut out of the plane over the base vertex.
# Anything > 1 keeps the orbit of sigma_inf disjoint.
DEFAULT_CALIBRATION = 2.0

# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

TOLERANCE = 1e-9

# Projected points are placed this fraction below the horocircle so that
# the strict interior test never fires on round-off.
BOUNDARY_SNAP = 1e-12

# Metric length of one tree edge.  diag(p, 1/p) translates by two edges and
# dilates the plane by p**2, so half-length edges keep sigma_inf invariant
# and give projected tree segments the density 2 log p.
TREE_EDGE_LENGTH = 0.5

# ---------------------------------------------------------------------------
# Scenes
# ---------------------------------------------------------------------------

DEFAULT_WINDOW_X = 8.0
DEFAULT_WINDOW_TREE_RADIUS = 4
DEFAULT_MIN_DIAMETER = 1e-3

# ---------------------------------------------------------------------------
# Combing and width
# ---------------------------------------------------------------------------

# Basepoint (x0, y0) in the plane over the base vertex.
BASEPOINT_X = 0.0
BASEPOINT_Y = 1.0

MAX_ADAPT_ITERATIONS = 10

# Width bounds: both planes avoid horoballs, one side meets a horoball,
# both sides meet the same horoball, and the overall bound.
BOUND_ZERO_SIDED = 1.0
BOUND_ONE_SIDED = 2.0
BOUND_TWO_SIDED = math.e**2 + 1.0


def overall_width_bound(p: int) -> float:
    """Return max{2 log p, e^2 + 2}."""
    return max(2.0 * math.log(p), math.e**2 + 2.0)


# Upper bound for the fitted constant C in L(n) <= C e^n.
LENGTH_CONSTANT_LIMIT = 10.0

DEFAULT_N_PAIRS = 200
DEFAULT_MAX_DISTANCE = 8.0
DEFAULT_N_MAX = 8
DEFAULT_LENGTH_SAMPLES = 500

# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

# Words over the PSL2(Z[1/p]) generators; lowercase is the inverse.
PSL2_LETTERS = "SsTtAa"

# Words over BS(1, n); uppercase is the inverse.
BS_LETTERS = "aAbB"

DEFAULT_AREA_BUDGET = 10**6
DEFAULT_KMAX = 8

# Witness loops up to this k get the search oracle; larger ones only the corridor count.
DEFAULT_SEARCH_KMAX = 2

# Points per letter when a witness loop is traced on sigma_inf.
DEFAULT_LOOP_SAMPLES = 8

# Where the area column of a witness loop comes from.
AREA_FROM_SEARCH = "search"
AREA_FROM_CORRIDORS = "corridors"

# ---------------------------------------------------------------------------
# Output tables
# ---------------------------------------------------------------------------

PATH_COLUMNS = ("leg", "s", "x", "y", "tree_edge", "lambda")

WIDTH_COLUMNS = (
    "pair",
    "case",
    "distance",
    "measured",
    "oracle",
    "case_bound",
    "bound",
    "slack",
    "passed",
)

LENGTH_COLUMNS = ("n", "max_length", "samples", "exp_n", "passed")

DEHN_COLUMNS = (
    "k",
    "word_length",
    "area",
    "area_exact",
    "area_source",
    "corridor_area",
    "rewriting_cost",
    "relator_applications",
    "distortion",
    "loop_length",
)
