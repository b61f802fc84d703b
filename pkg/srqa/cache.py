import hashlib
import logging
from typing import Optional

import numpy as np
from alembic.runtime.migration import MigrationContext
from alembic.script import ScriptDirectory
from flask import current_app
from sqlalchemy.exc import IntegrityError

from srqa import db
from srqa.core.constants import EXTRACTOR_VERSION
from srqa.core.features import extract_features
from srqa.core.imgcore import load_image
from srqa.errors import ImageError
from srqa.models import FeatureRecord

logger = logging.getLogger(__name__)

HASH_CHUNK_SIZE = 1 << 20


def content_hash(path) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(HASH_CHUNK_SIZE), b""):
                digest.update(chunk)
    except OSError as error:
        raise ImageError(f"unreadable file: {path}") from error
    return digest.hexdigest()


def bootstrap_schema() -> None:
    """Create the cache table on first use and stamp it at the migration head.

    A later `srqa db upgrade` then sees an up-to-date database.
    """
    script = ScriptDirectory(current_app.extensions["migrate"].directory)
    with db.engine.begin() as connection:
        context = MigrationContext.configure(connection)
        if context.get_current_revision() is not None:
            return
        db.metadata.create_all(connection)
        context.stamp(script, "head")
    logger.info(f"Created feature cache schema at revision {script.get_current_head()}")


def compute_features(path) -> np.ndarray:
    return extract_features(load_image(path)).as_array()


class FeatureCache:
    """Per-image feature records keyed by (file content hash, extractor version).

    Must be used inside an application context.
    """

    def __init__(self, extractor_version: str = EXTRACTOR_VERSION):
        self.extractor_version = extractor_version
        bootstrap_schema()

    def _lookup(self, digest: str) -> Optional[FeatureRecord]:
        return db.session.execute(
            db.select(FeatureRecord).filter_by(content_hash=digest, extractor_version=self.extractor_version)
        ).scalar()

    def get(self, path) -> Optional[np.ndarray]:
        record = self._lookup(content_hash(path))
        return None if record is None else np.array(record.values, dtype=np.float64)

    def put(self, path, values, digest: str = None) -> FeatureRecord:
        digest = digest or content_hash(path)
        record = FeatureRecord(content_hash=digest, extractor_version=self.extractor_version,
                               source_path=str(path), values=np.asarray(values).ravel())
        db.session.add(record)
        try:
            db.session.commit()
        except IntegrityError:
            # another writer stored the same image first
            db.session.rollback()
            record = self._lookup(digest)
        return record

    def get_or_compute(self, path) -> np.ndarray:
        digest = content_hash(path)
        record = self._lookup(digest)
        if record is not None:
            logger.debug(f"Feature cache hit for {path}")
            return np.array(record.values, dtype=np.float64)
        values = compute_features(path)
        self.put(path, values, digest)
        logger.info(f"Cached features for {path}")
        return values

    def entry_extractor(self):
        """Adapter for the evaluation harness, which passes manifest entries."""
        def extract(entry) -> np.ndarray:
            return self.get_or_compute(entry.image_path)
        return extract

    def count(self) -> int:
        return db.session.execute(
            db.select(db.func.count()).select_from(FeatureRecord).filter_by(extractor_version=self.extractor_version)
        ).scalar()
