class IOErrorCode:
    FILE_READ_ERROR_CODE = 1001
    MALFORMED_WAV_ERROR_CODE = 1002
    CORPUS_LAYOUT_ERROR_CODE = 1003
    MODEL_FILE_ERROR_CODE = 1004
    MODEL_FILE_VERSION_ERROR_CODE = 1005
    MODEL_FILE_CHECKSUM_ERROR_CODE = 1006
    CONFIG_FILE_ERROR_CODE = 1007


class IOErrorMessage:
    UNABLE_TO_READ_FILE = "Unable to read file: '{}'"
    UNSUPPORTED_WAV_FORMAT = "WAV file '{}' must be mono 16-bit PCM but found dtype {} with shape {}"
    UNSUPPORTED_WAV_SAMPLE_RATE = "WAV file '{}' must be sampled at 8000 or 16000 Hz but found {} Hz"
    CORPUS_ROOT_MISSING = "Corpus root '{}' does not exist or is not a directory"
    EMPTY_CORPUS_ROOT = "Corpus root '{}' contains no speaker directories; expected layout root/speaker_id/{{train,test}}/*.wav"
    MISSING_SPLIT_DIRECTORY = "Speaker '{}' is missing the '{}' directory; expected layout root/speaker_id/{{train,test}}/*.wav"
    EMPTY_SPLIT_DIRECTORY = "Speaker '{}' has no WAV files in its '{}' directory"
    DUPLICATE_SPEAKER_ID = "Speaker id '{}' appears more than once in the corpus"
    CORRUPTED_MODEL_FILE = "Model file '{}' is corrupted and can not be parsed"
    NOT_A_MODEL_FILE = "File '{}' is not a speakerly model file"
    UNSUPPORTED_MODEL_FILE_VERSION = "Model file version {} is not supported, expected version {}"
    MODEL_FILE_CHECKSUM_MISMATCH = "Checksum mismatch in model file '{}'"
    MALFORMED_CONFIG_LINE = "Unable to parse config file '{}'"
    MALFORMED_CONFIG_VALUE = "Unable to parse value '{}' of config key '{}'"


class ValidationErrorCode:
    KEY_ERROR_EXCEPTION_CODE = 4001
    DATA_FORMAT_EXCEPTION_CODE = 4002
    VALUE_EXCEPTION_CODE = 4003
    SHAPE_EXCEPTION_CODE = 4004


class ValidationErrorMessage:
    DATA_IS_NOT_DICT = "{} must be of type Dict but found {}"
    DATA_IS_NOT_INT = "{} must be of type Int but found {}"
    DATA_IS_NOT_INT_OR_FLOAT = "{} must be of type Int or Float but found {}"
    DATA_IS_NOT_STRING = "{} must be of type String but found {}"
    DATA_IS_NOT_LIST = "{} must be of type List but found {}"
    DATA_IS_AN_EMPTY_LIST = "{} cannot be an empty list"
    DATA_IS_NOT_BOOL = "{} must be of type Bool but found {}"
    DATA_IS_NEGATIVE = "{} cannot be negative"
    DATA_IS_NOT_STRICTLY_POSITIVE = "{} cannot be less than or equal to zero"
    DATA_NOT_IN_RANGE = "{} must be within range [{}, {}] but found {}"
    DATA_NOT_IN_CHOICES = "{} must be one of {} but found {}"
    KEY_NOT_FOUND_IN_DICT = "Expected key: '{}' missing from the dictionary"

    INVALID_VECTOR_SHAPE = "{} must have shape {} but found {}"
    NON_FINITE_VALUES = "{} must contain only finite values"
    DIMENSION_MISMATCH = "{} and {} must have the same dimension but found {} and {}"
    MAX_LAG_TOO_LARGE = "max_lag must be less than the frame length {} but found {}"
    ORDER_TOO_LARGE = "order must be at most len(r) - 1 = {} but found {}"
    INVALID_RANGE_BOUNDS = "{} lower bound must not exceed its upper bound but found ({}, {})"
    INVALID_ALPHA_GRID = "Unable to parse alpha grid specification: '{}'"

    INCORRECT_CONFUSION_SUM = "Confusion counts must sum to total_decisions = {} but sum to {}"
    INCORRECT_ERROR_RATE = "error_rate must equal wrong_decisions / total_decisions"


class SignalErrorCode:
    UNSUPPORTED_SAMPLE_RATE_CODE = 5001
    ALREADY_PREPARED_CODE = 5002
    NOT_PREPARED_CODE = 5003
    DEGENERATE_FRAME_CODE = 5004
    SINGULAR_AUTOCORRELATION_CODE = 5005
    UNSTABLE_MODEL_CODE = 5006


class SignalErrorMessage:
    UNSUPPORTED_SAMPLE_RATE = "Sample rate must be one of {} Hz but found {} Hz"
    ALREADY_PREPARED = "Signal has already been prepared; prepare must be applied exactly once"
    NOT_PREPARED = "Signal must be prepared at 8000 Hz before framing"
    DEGENERATE_FRAME = "Degenerate frame: autocorrelation r[0] must be positive but found {}"
    SINGULAR_AUTOCORRELATION = "Autocorrelation is not positive definite (prediction error {} at order {})"
    UNSTABLE_MODEL = "LPC model is unstable (reflection coefficient {} at order {})"
    UNSTABLE_GENERATOR = "Synthetic generator is unstable: pole radius range {} must lie inside the unit circle"


class CodebookErrorCode:
    INSUFFICIENT_DATA_CODE = 6001
    EMPTY_CODEBOOK_CODE = 6002
    UNRECOVERABLE_EMPTY_CELL_CODE = 6003


class CodebookErrorMessage:
    INSUFFICIENT_DATA = "Training a codebook of {} bits requires at least {} vectors but found {}"
    EMPTY_CODEBOOK = "Codebook must contain at least one centroid"
    UNRECOVERABLE_EMPTY_CELL = "Codebook of {} centroids still has empty cells after {} recovery rounds; training data has too few distinct vectors"


class TrainingErrorCode:
    NO_TRAINING_SAMPLES_CODE = 7001
    NO_FRAMES_CODE = 7002
    CODEBOOK_SIZE_MISMATCH_CODE = 7003


class TrainingErrorMessage:
    NO_TRAINING_SAMPLES = "MLP training requires at least one (history, target) sample"
    NO_FRAMES = "A nonlinear codebook requires at least one training frame"
    FRAME_COUNT_MISMATCH = "frames and lpcc must have equal length but found {} and {}"
    CODEBOOK_SIZE_MISMATCH = "Linear codebook has {} centroids but the nonlinear codebook needs {}"
    SPEAKER_CONTEXT = "speaker '{}': {}"


class RecognitionErrorCode:
    MISSING_NONLINEAR_CODEBOOK_CODE = 8001
    INVALID_K_CODE = 8002
    EMPTY_SENTENCE_CODE = 8003
    NO_MODELS_CODE = 8004
    UNKNOWN_SPEAKER_CODE = 8005
    NO_SCORABLE_UTTERANCES_CODE = 8006


class RecognitionErrorMessage:
    MISSING_NONLINEAR_CODEBOOK = "Speaker '{}' has no nonlinear codebook but residual scoring was requested"
    INVALID_K = "k must be within range [1, {}] but found {}"
    EMPTY_SENTENCE = "Sentence contains no scorable frames"
    NO_MODELS = "At least one speaker model is required"
    UNKNOWN_SPEAKER = "Corpus speaker '{}' has no trained model"
    NO_SCORABLE_UTTERANCES = "None of the {} test utterances contains scorable frames"
