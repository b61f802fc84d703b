# Image formation
LUMA_WEIGHTS = (0.299, 0.587, 0.114)
SUPPORTED_IMAGE_FORMATS = ("PNG", "PPM")
# (s, sigma) pairs used to synthesise LR inputs
SCALE_SIGMA_PAIRS = {2: 0.8, 3: 1.0, 4: 1.2, 5: 1.6, 6: 1.8, 8: 2.0}
PYRAMID_LEVELS = 3
PYRAMID_BLUR_SIGMA = 1.0
PYRAMID_BLUR_SIZE = 5
PYRAMID_MIN_BASE = 7

# Statistics
GGD_MIN_SAMPLES = 30
GGD_GAMMA_MIN = 0.1
GGD_GAMMA_MAX = 10.0
GGD_TOLERANCE = 1e-4
VARIANCE_FLOOR = 1e-20
CORRELATION_WINDOW_SIZE = 15
CORRELATION_WINDOW_SIGMA = 1.5
CORRELATION_C0_FACTOR = 1e-4
CORRELATION_C0_FLOOR = 1e-12
PERCEPTUAL_TRIM_FRACTION = 0.1
PERCEPTUAL_MIN_SCORES = 10

# Local frequency features
DCT_BLOCK_SIZE = 7
DCT_MEAN_GUARD = 1e-12
POOL_FRACTION = 0.1
LOCAL_FEATURE_DIM = 18

# Steerable pyramid
STEER_SCALES = 2
STEER_ORIENTATIONS = 6
STEER_MIN_SIZE = 32

# Global frequency features
NEIGHBORHOOD_SIZE = 15
ZHAT_FLOOR = 1e-12
COVARIANCE_RIDGE = 1e-6
GLOBAL_FEATURE_DIM = 45
DEGENERATE_GAMMA = GGD_GAMMA_MAX
DEGENERATE_CORRELATION = 0.0

# Spatial features
PATCH_SIZE = 5
SINGULAR_VALUE_FLOOR = 1e-15
SPATIAL_FEATURE_DIM = 75

FEATURE_DIM = LOCAL_FEATURE_DIM + GLOBAL_FEATURE_DIM + SPATIAL_FEATURE_DIM
MIN_FEATURE_IMAGE_SIZE = 32
EXTRACTOR_VERSION = "1.0"

# Regression
DEFAULT_TREES = 2000
DEFAULT_MIN_LEAF = 5
DEFAULT_SUBSAMPLE = 1.0
SPLIT_VARIANCE_FLOOR = 1e-9
LAMBDA_RIDGE = 1e-6
SCORE_MIN = 0.0
SCORE_MAX = 10.0
MODEL_FORMAT = "srqa-model"
MODEL_VERSION = 1
MODEL_KINDS = ("two_stage", "concat", "local", "global", "spatial")
FEATURE_BLOCKS = ("local", "global", "spatial")

# Harness
DEFAULT_FOLDS = 5
DEFAULT_IMAGE_HOLDOUT = 6
DEFAULT_METHOD_HOLDOUT = 2
DEFAULT_REPETITIONS = 100
PROTOCOLS = ("5fold", "kfold", "leave-image-out", "leave-method-out")
MANIFEST_HEADER = ("image_path", "ref_id", "method", "s", "sigma", "score")
RATINGS_HEADER = ("image_path", "ref_id", "method", "s", "sigma", "rating")
CASE_COUNT = 4

# Synthetic dataset
SYNTH_SCORE_GUIDE = {2: 8.5, 3: 6.0, 4: 5.0, 5: 4.0, 6: 3.0, 8: 1.5}
SYNTH_METHOD_SHIFTS = {"nearest": -1.5, "bilinear": -0.5, "backprojection": 0.5}
SYNTH_NOISE = 0.25
SYNTH_CROP_MULTIPLE = 12
SYNTH_DEFAULT_SCALES = (2, 3, 4)
SYNTH_DEFAULT_SOURCES = 5
SYNTH_DEFAULT_SIZE = 192
BACK_PROJECTION_ITERATIONS = 10
DEAD_LEAVES_MIN_RADIUS = 2.0

# Fusion
DEFAULT_GRID = 3
DEFAULT_OVERLAP = 16
MIN_CELL_SIZE = 64

# Error messages
UNREADABLE_FILE_ERROR = "unreadable file: {path}"
UNSUPPORTED_FORMAT_ERROR = "unsupported format {format} for {path}; expected PNG or PGM/PPM"
ZERO_DIMENSION_ERROR = "zero-dimension image: {path}"
IMAGE_RANGE_ERROR = "image values must be finite and within [0, 1]"
IMAGE_SHAPE_ERROR = "image data must be a 2-D array, got shape {shape}"
UNDERSIZED_IMAGE_ERROR = "image of {height}x{width} is too small; need at least {min_height}x{min_width}"
SIGMA_ERROR = "sigma must be positive, got {sigma}"
KERNEL_SIZE_ERROR = "kernel size must be an odd integer >= 3, got {size}"
SCALE_ERROR = "scale factor must be an integer >= 2, got {s}"
LEVELS_ERROR = "pyramid needs at least one level, got {levels}"
PATCH_ARGS_ERROR = "patch size and stride must be positive, got size={size} stride={stride}"
TOO_FEW_SAMPLES_ERROR = "need at least {minimum} samples, got {count}"
LENGTH_MISMATCH_ERROR = "length mismatch: {left} vs {right}"
CONSTANT_INPUT_ERROR = "rank correlation is undefined for constant input"
ZERO_VARIANCE_ERROR = "samples have zero variance"
SHAPE_MISMATCH_ERROR = "shape mismatch: {left} vs {right}"
DCT_BLOCK_SHAPE_ERROR = "DCT block must be {size}x{size}, got {shape}"
BAND_INDEX_ERROR = "no band at scale {scale}, orientation {orientation}"
DEGENERATE_BAND_ERROR = "band has degenerate neighborhood covariance"
DECOMPOSITION_SHAPE_ERROR = "malformed decomposition: {detail}"
EMPTY_DATA_ERROR = "training data is empty"
TREE_COUNT_ERROR = "tree count must be >= 1, got {trees}"
FEATURE_DIM_ERROR = "expected {expected} features, got {actual}"
NON_FINITE_FEATURES_ERROR = "features contain non-finite values"
TOO_FEW_ROWS_ERROR = "need at least {minimum} rows, got {count}"
MODEL_KIND_ERROR = "unknown model kind {kind}"
CORRUPT_MODEL_ERROR = "corrupt model file {path}: {detail}"
MODEL_VERSION_ERROR = "model file {path} has version {found}; this build reads version {expected}"
FUSION_CANDIDATES_ERROR = "fusion needs at least 2 candidates, got {count}"
FUSION_SIZE_ERROR = "candidate {index} has shape {shape}, expected {expected}"
FUSION_CELL_ERROR = "grid cells of {height}x{width} are smaller than {minimum}x{minimum}"
FUSION_OVERLAP_ERROR = "overlap {overlap} is too large for cells of {height}x{width}"
