# Feature command constants
OUTPUT_FORMATS = ("json", "csv")
DEFAULT_OUTPUT_FORMAT = "json"
CSV_COLUMNS = ("block", "name", "value")
# Messages
CACHE_WARMED_MESSAGE = "Cached features for {count} images ({fresh} extracted)"
CACHE_COUNT_MESSAGE = "{count} cached feature records (extractor {version})"
FEATURES_WRITTEN_MESSAGE = "Wrote {count} features to {path}"
