VERSION = '0.3.0'

DEFAULT_CHI = 16
DEFAULT_TRIALS = 10_000
DEFAULT_RATIO = 10
ETA_LOW = 10
DEPOLARIZING_ETA = 0.5

WILSON_CONFIDENCE = 0.95

FIT_WINDOW = 0.3
FIT_ORDER = 2
BOOTSTRAP_RESAMPLES = 200
NU_STARTS = (0.8, 1.0, 1.5, 2.0)
SIMPLEX_DIAMETER = 1e-8

# exact enumeration limits (stabilizer group of d=3 is 2^8, d=5 is 2^24)
EXACT_MAX_D = 3
EXACT_SPOT_CHECK_D = 5
DISTANCE_MAX_D = 5

CSV_COLUMNS = (
    'regime', 'placement', 'deformation', 'd', 'eta_low', 'eta_high', 'p_quiet', 'p_noisy', 'p',
    'chi', 'trials', 'fail_x', 'fail_y', 'fail_z', 'p_fail', 'wilson_lo', 'wilson_hi', 'seed',
)

CONFIG_SCHEMA_VERSION = 1

# argmax ties resolve to the earliest class in this order
TIE_BREAK_ORDER = ('I', 'X', 'Z', 'Y')
STABILIZER_CHUNK_BITS = 14
