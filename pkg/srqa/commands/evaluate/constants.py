# Evaluation command constants
DEFAULT_REPORT_DIR = "report"
REPORT_WRITTEN_MESSAGE = "Report files: {paths}"
AGGREGATED_MESSAGE = "Aggregated scores for {count} images -> {path}"
SYNTH_WRITTEN_MESSAGE = "Synthetic manifest with {count} entries -> {path}"
