from .feature_record import FeatureRecord

__all__ = [
    "FeatureRecord",
]
