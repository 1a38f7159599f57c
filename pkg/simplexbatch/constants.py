import logging

# Largest group we are willing to enumerate element by element
ENUMERATION_CAP = 2 ** 20

# Exhaustive sweeps refuse more candidate sequences than this unless forced
SEARCH_NODE_CAP = 10 ** 8
# Upper bound on points scanned by find_nonzero_evaluation
EVALUATION_BUDGET = 10 ** 7

# phi bijectivity is re-checked at construction up to this dimension
PHI_CHECK_MAX_K = 12
# Definition-level oracle only runs on tiny simplex codes
ORACLE_MAX_K = 4
# serve_via_special_service falls back to brute force up to this k
BRUTE_FORCE_MAX_K = 4

# Expansion guards for the polynomial oracle
SYMBOLIC_F_MAX_M = 4
CONCRETE_F_MAX_M = 5
DYSON_MAX_M = 5
VANDERMONDE_MAX_M = 7
CHAR2_MAX_M = 4

DEFAULT_MAX_SUBSET_SIZE = 2

DEFAULT_SEED = 20220117
DEFAULT_TRIALS = 1000

SCHEMA_VERSION = 1

LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL
}
