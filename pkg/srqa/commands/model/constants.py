# Model command constants
MODEL_TRAINED_MESSAGE = "Trained {kind} model on {rows} images ({trees} trees per forest) -> {path}"
SCORE_FORMAT = "{score:.1f}"
