from datetime import datetime
import json
import uuid
from srqa import db


class FeatureRecord(db.Model):
    __tablename__ = "feature_records"
    __table_args__ = (
        db.UniqueConstraint("content_hash", "extractor_version", name="uq_feature_records_hash_version"),
    )

    # Keys for serialization
    ID_KEY = "id"
    CONTENT_HASH_KEY = "content_hash"
    EXTRACTOR_VERSION_KEY = "extractor_version"
    SOURCE_PATH_KEY = "source_path"
    VALUES_KEY = "values"
    CREATED_AT_KEY = "created_at"

    id = db.Column(db.String(32), primary_key=True, default=lambda: uuid.uuid4().hex)
    content_hash = db.Column(db.String(64), nullable=False, index=True)
    extractor_version = db.Column(db.String(16), nullable=False)
    source_path = db.Column(db.String(1024), nullable=False)
    values_json = db.Column("values", db.Text, nullable=False)
    created_at = db.Column(db.DateTime, nullable=False, default=datetime.utcnow)

    def __init__(self, content_hash: str, extractor_version: str, source_path: str, values):
        self.content_hash = content_hash
        self.extractor_version = extractor_version
        self.source_path = source_path
        # repr-exact floats so cached features equal freshly computed ones
        self.values_json = json.dumps([float(value) for value in values])

    @property
    def values(self):
        return json.loads(self.values_json)

    def to_dict(self):
        return {
            self.ID_KEY: self.id,
            self.CONTENT_HASH_KEY: self.content_hash,
            self.EXTRACTOR_VERSION_KEY: self.extractor_version,
            self.SOURCE_PATH_KEY: self.source_path,
            self.VALUES_KEY: self.values,
            self.CREATED_AT_KEY: (
                self.created_at.isoformat() if self.created_at else None
            ),
        }
