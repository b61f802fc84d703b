class SrqaError(Exception):
    """Base class for every failure the toolkit reports to its callers."""


class ImageError(SrqaError):
    pass


class UndersizedImageError(ImageError):
    pass


class ParameterError(SrqaError):
    pass


class StatsError(SrqaError):
    pass


class DegenerateBandError(SrqaError):
    pass


class ForestError(SrqaError):
    pass


class ModelFormatError(SrqaError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class ManifestError(SrqaError):
    def __init__(self, message: str, rows=None):
        super().__init__(message)
        self.rows = list(rows or [])


class SplitError(SrqaError):
    pass


class FusionError(SrqaError):
    pass
