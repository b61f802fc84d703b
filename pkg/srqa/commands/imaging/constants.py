# Imaging command constants
REGION_MAP_SUFFIX = ".json"
DOWNSAMPLED_MESSAGE = "{height}x{width} -> {out_height}x{out_width} (s={s}, sigma={sigma}) -> {path}"
FUSED_MESSAGE = "Fused {count} candidates on a {grid}x{grid} grid -> {path}"
# Error messages
NO_SIGMA_ERROR = "no standard sigma for s={s}; pass --sigma (standard pairs: {pairs})"
