import json
import logging

import numpy as np
from marshmallow import Schema, fields, validate, post_load, ValidationError, EXCLUDE

from srqa.core.constants import (MODEL_FORMAT, MODEL_VERSION, MODEL_KINDS, SCORE_MIN, SCORE_MAX, CORRUPT_MODEL_ERROR,
                                 MODEL_VERSION_ERROR)
from srqa.core.regress import Tree, Forest, TwoStageModel
from srqa.errors import ModelFormatError, ModelVersionError

logger = logging.getLogger(__name__)

FORMAT_KEY = "format"
VERSION_KEY = "version"


class NumpyArray(fields.List):
    """List field that loads into a numpy array of ``dtype``."""

    def __init__(self, inner, dtype, **kwargs):
        super().__init__(inner, **kwargs)
        self.dtype = dtype

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        return super()._serialize(np.asarray(value).tolist(), attr, obj, **kwargs)

    def _deserialize(self, value, attr, data, **kwargs):
        return np.asarray(super()._deserialize(value, attr, data, **kwargs), dtype=self.dtype)


#Model file Schemas
class TreeSchema(Schema):
    feature = NumpyArray(fields.Integer(), np.int64, required=True)
    threshold = NumpyArray(fields.Float(allow_nan=False), np.float64, required=True)
    left = NumpyArray(fields.Integer(), np.int64, required=True)
    right = NumpyArray(fields.Integer(), np.int64, required=True)
    value = NumpyArray(fields.Float(allow_nan=False), np.float64, required=True)

    @post_load
    def make_tree(self, data, **kwargs):
        lengths = {len(column) for column in data.values()}
        if len(lengths) != 1 or 0 in lengths:
            raise ValidationError("tree columns must be non-empty and of equal length")
        count = lengths.pop()
        for key in ("left", "right"):
            if np.any(data[key] >= count):
                raise ValidationError(f"tree {key} child index out of range")
        return Tree(**data)


class ForestSchema(Schema):
    feature_dim = fields.Integer(required=True, validate=validate.Range(min=1))
    trees = fields.List(fields.Nested(TreeSchema), required=True, validate=validate.Length(min=1))

    @post_load
    def make_forest(self, data, **kwargs):
        return Forest(trees=tuple(data["trees"]), feature_dim=data["feature_dim"])


class ModelFileSchema(Schema):
    class Meta:
        unknown = EXCLUDE

    format = fields.String(required=True, validate=validate.Equal(MODEL_FORMAT))
    version = fields.Integer(required=True, validate=validate.Equal(MODEL_VERSION))
    kind = fields.String(required=True, validate=validate.OneOf(MODEL_KINDS))
    forests = fields.List(fields.Nested(ForestSchema), required=True, validate=validate.Length(min=1))
    weights = NumpyArray(fields.Float(allow_nan=False), np.float64, required=True)
    intercept = fields.Float(required=True, allow_nan=False)
    train_meta = fields.Dict(keys=fields.String(), load_default=dict)

    @post_load
    def make_model(self, data, **kwargs):
        if len(data["weights"]) != len(data["forests"]):
            raise ValidationError("one weight per forest is required", "weights")
        return TwoStageModel(kind=data["kind"], forests=tuple(data["forests"]), weights=data["weights"],
                             intercept=data["intercept"], train_meta=data["train_meta"])


def dump_model(model: TwoStageModel, path) -> None:
    document = ModelFileSchema().dump({
        FORMAT_KEY: MODEL_FORMAT,
        VERSION_KEY: MODEL_VERSION,
        "kind": model.kind,
        "forests": [{"feature_dim": forest.feature_dim, "trees": list(forest.trees)} for forest in model.forests],
        "weights": model.weights,
        "intercept": model.intercept,
        "train_meta": model.train_meta,
    })
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, sort_keys=True)


def read_model(path) -> TwoStageModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as error:
        raise ModelFormatError(CORRUPT_MODEL_ERROR.format(path=path, detail=error)) from error
    if not isinstance(document, dict) or document.get(FORMAT_KEY) != MODEL_FORMAT:
        raise ModelFormatError(CORRUPT_MODEL_ERROR.format(path=path, detail="not a model file"))
    if document.get(VERSION_KEY) != MODEL_VERSION:
        raise ModelVersionError(MODEL_VERSION_ERROR.format(
            path=path, found=document.get(VERSION_KEY), expected=MODEL_VERSION))
    try:
        return ModelFileSchema().load(document)
    except ValidationError as error:
        raise ModelFormatError(CORRUPT_MODEL_ERROR.format(path=path, detail=error.messages)) from error


#Dataset Schemas
class ManifestRowSchema(Schema):
    image_path = fields.String(required=True, validate=validate.Length(min=1))
    ref_id = fields.String(required=True, validate=validate.Length(min=1))
    method = fields.String(required=True, validate=validate.Length(min=1))
    s = fields.Integer(required=True, validate=validate.Range(min=2))
    sigma = fields.Float(required=True, allow_nan=False, validate=validate.Range(min=0, min_inclusive=False))
    score = fields.Float(required=True, allow_nan=False, validate=validate.Range(min=SCORE_MIN, max=SCORE_MAX))


class RatingRowSchema(Schema):
    image_path = fields.String(required=True, validate=validate.Length(min=1))
    ref_id = fields.String(required=True, validate=validate.Length(min=1))
    method = fields.String(required=True, validate=validate.Length(min=1))
    s = fields.Integer(required=True, validate=validate.Range(min=2))
    sigma = fields.Float(required=True, allow_nan=False, validate=validate.Range(min=0, min_inclusive=False))
    rating = fields.Float(required=True, allow_nan=False, validate=validate.Range(min=SCORE_MIN, max=SCORE_MAX))


#Report Schemas
class CaseSchema(Schema):
    image_path = fields.String()
    method = fields.String()
    predicted = fields.Float()
    perceptual = fields.Float()


class MethodResultSchema(Schema):
    method = fields.String()
    count = fields.Integer()
    spearman = fields.Float(allow_none=True)


class PredictionSchema(Schema):
    image_path = fields.String()
    ref_id = fields.String()
    method = fields.String()
    s = fields.Integer()
    score = fields.Float()
    raw = fields.Float()
    predicted = fields.Float()


class EvaluationReportSchema(Schema):
    protocol = fields.String()
    kind = fields.String()
    split_descriptor = fields.String()
    splits = fields.Integer()
    repetitions = fields.Integer()
    seed = fields.Integer()
    overall_spearman = fields.Float(allow_none=True)
    rmse = fields.Float()
    per_method = fields.List(fields.Nested(MethodResultSchema))
    family_rmse = fields.Dict(keys=fields.String(), values=fields.Float())
    best_cases = fields.List(fields.Nested(CaseSchema))
    worst_cases = fields.List(fields.Nested(CaseSchema))
    predictions = fields.List(fields.Nested(PredictionSchema))
