from marshmallow import Schema, fields, validate
from srqa.core.constants import DEFAULT_TREES, DEFAULT_MIN_LEAF, DEFAULT_SUBSAMPLE, MODEL_KINDS


#Input Schemas
class ForestOptionsSchema(Schema):
    trees = fields.Integer(load_default=DEFAULT_TREES, validate=validate.Range(min=1))
    seed = fields.Integer(load_default=0, validate=validate.Range(min=0))
    kind = fields.String(load_default="two_stage", validate=validate.OneOf(MODEL_KINDS))
    min_leaf = fields.Integer(load_default=DEFAULT_MIN_LEAF, validate=validate.Range(min=1))
    subsample = fields.Float(load_default=DEFAULT_SUBSAMPLE,
                             validate=validate.Range(min=0, max=1, min_inclusive=False))
    no_bootstrap = fields.Boolean(load_default=False)
    threads = fields.Integer(allow_none=True, load_default=None, validate=validate.Range(min=1))
    no_cache = fields.Boolean(load_default=False)


class TrainOptionsSchema(ForestOptionsSchema):
    manifest = fields.String(required=True)
    out = fields.String(required=True)


class PredictOptionsSchema(Schema):
    model = fields.String(required=True)
    image = fields.String(required=True)
    as_json = fields.Boolean(load_default=False)


#Output Schemas
class QualityPredictionSchema(Schema):
    image = fields.String()
    score = fields.Float()
    raw = fields.Float()
    per_forest = fields.Dict(keys=fields.String(), values=fields.Float())
