from celery import group, shared_task
from celery.utils.log import get_task_logger
from srqa.cache import FeatureCache, content_hash

logger = get_task_logger(__name__)

PATH_KEY = "path"
CONTENT_HASH_KEY = "content_hash"
CACHED_KEY = "cached"


@shared_task(name="extract_features_task")
def extract_features_task(image_path):
    cache = FeatureCache()
    digest = content_hash(image_path)
    cached = cache.get(image_path) is not None
    if not cached:
        cache.get_or_compute(image_path)
        logger.info(f"Extracted features for {image_path}")
    return {PATH_KEY: image_path, CONTENT_HASH_KEY: digest, CACHED_KEY: cached}


def warm_feature_cache(paths):
    """Extract and cache features for every path; runs in-process when no broker is configured."""
    paths = list(dict.fromkeys(str(path) for path in paths))
    if not paths:
        return []
    result = group(extract_features_task.s(path) for path in paths).apply_async()
    summaries = [child.get(disable_sync_subtasks=False) for child in result.results]
    fresh = sum(1 for summary in summaries if not summary[CACHED_KEY])
    logger.info(f"Feature cache warmed: {fresh} extracted, {len(summaries) - fresh} already cached")
    return summaries
