
##################################
# Sample rates and audio handling
##################################
SUPPORTED_INPUT_SAMPLE_RATES = (8000, 16000)
TARGET_SAMPLE_RATE = 8000
INT16_FULL_SCALE = 32768.0


#####################
# Decimation filter
#####################
DECIMATION_FILTER_TAPS = 63
DECIMATION_CUTOFF_HZ = 3400


##################################
# Pre-emphasis H(z) = 1 - 0.95z^-1
##################################
PRE_EMPHASIS_COEFFICIENT = 0.95


########################################
# Framing: 30 ms Hamming, 2/3 overlap
########################################
FRAME_LENGTH = 240  # l_t
FRAME_HOP = 80


####################
# Predictive analysis
####################
LPC_ORDER = 10
CEPSTRAL_ORDER = 12  # p


################################
# Linear codebook (splitting/Lloyd)
################################
SPLIT_EPSILON = 0.1
DEGENERATE_SPLIT_VECTOR_VALUE = 1e-4
LLOYD_RELATIVE_TOLERANCE = 1e-4
LLOYD_MAX_ITERATIONS = 50
EMPTY_CELL_MAX_ROUNDS = 50
POWER_ITERATION_MAX_ITERATIONS = 100
POWER_ITERATION_TOLERANCE = 1e-10
MIN_DOMINANT_EIGENVALUE = 1e-12
MIN_CODEBOOK_SIZE_BITS = 0
MAX_CODEBOOK_SIZE_BITS = 10


###############################
# MLP predictor 10-4-2-1
###############################
MLP_INPUT_SIZE = 10  # n_i
MLP_HIDDEN_1_SIZE = 4  # n_h1
MLP_HIDDEN_2_SIZE = 2  # n_h2
MLP_PARAMETER_COUNT = ((MLP_INPUT_SIZE * MLP_HIDDEN_1_SIZE + MLP_HIDDEN_1_SIZE) +
                       (MLP_HIDDEN_1_SIZE * MLP_HIDDEN_2_SIZE + MLP_HIDDEN_2_SIZE) +
                       (MLP_HIDDEN_2_SIZE + 1))
MLP_INIT_RANGE = 0.5


#######################################
# Levenberg-Marquardt multi-start setup
#######################################
DEFAULT_EPOCHS_PER_START = 8
DEFAULT_NUM_RANDOM_STARTS = 4
DEFAULT_LM_LAMBDA_INIT = 1e-3
DEFAULT_LM_LAMBDA_FACTOR = 10.0
LM_MAX_ESCALATIONS_PER_EPOCH = 10
LM_MAX_LAMBDA = 1e10
DEFAULT_SEED = 0


#############################
# Nonlinear codebook training
#############################
MAX_SAMPLES_PER_CLUSTER = 20000
DEFAULT_LLOYD_ITERS = 0


############################
# Recognition and cost model
############################
DEFAULT_K = 2
DEFAULT_ALPHA = 0.0
DEFAULT_LINEAR_BITS = 5
DEFAULT_NONLINEAR_BITS = 4

# Instructions for one tanh evaluation; solves 2*32*230*(57 + 6*c_tg) ~ 1.6E6
DEFAULT_C_TG = 9

DEFAULT_COST_MODEL = {
    "t_cl": 128,
    "t_cnl": 32,
    "k": 2,
    "l_t": FRAME_LENGTH,
    "n_i": MLP_INPUT_SIZE,
    "n_h1": MLP_HIDDEN_1_SIZE,
    "n_h2": MLP_HIDDEN_2_SIZE,
    "c_tg": DEFAULT_C_TG,
    "p": CEPSTRAL_ORDER,
    "n": 1
}


###########################
# Synthetic speaker defaults
###########################
DEFAULT_SYNTHETIC_SPEAKERS = 10
DEFAULT_SYNTHETIC_NONLINEAR_FRACTION = 0.5
DEFAULT_SYNTHETIC_POLE_RADIUS_RANGE = (0.6, 0.95)
DEFAULT_SYNTHETIC_GAIN_RANGE = (1.0, 3.0)
DEFAULT_SYNTHETIC_DURATION_RANGE = (1.0, 3.0)  # seconds
DEFAULT_SYNTHETIC_NOISE_LEVEL = 0.01
DEFAULT_SYNTHETIC_TRAIN_UTTERANCES = 5
DEFAULT_SYNTHETIC_TEST_UTTERANCES = 5


####################
# Corpus layout
####################
CORPUS_SPLITS = ("train", "test")
WAV_EXTENSION = ".wav"


#################
# Model file
#################
MODEL_FILE_FORMAT = "speakerly-models"
MODEL_FILE_VERSION = 1
MODEL_FILE_KEYS = [
    "format",
    "version",
    "checksum",
    "payload"
]


##################################
# List of keys in evaluation report
##################################
EVAL_REPORT_KEYS = [
    "error_rate",
    "total_decisions",
    "wrong_decisions",
    "confusion",
    "decisions",
    "config",
    "skipped_utterances",
    "total_execution_time"
]

EVAL_REPORT_CONFIG_KEYS = [
    "alpha",
    "k",
    "measure",
    "residue_source",
    "criterion"
]

DECISION_LOG_COLUMNS = [
    "utterance_id",
    "true_speaker",
    "decided_speaker",
    "correct"
]
