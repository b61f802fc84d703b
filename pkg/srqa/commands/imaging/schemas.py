from marshmallow import Schema, fields, validate
from srqa.core.constants import DEFAULT_GRID, DEFAULT_OVERLAP


#Input Schemas
class DownsampleOptionsSchema(Schema):
    image = fields.String(required=True)
    out = fields.String(required=True)
    scale = fields.Integer(required=True, validate=validate.Range(min=2))
    sigma = fields.Float(allow_none=True, load_default=None, allow_nan=False,
                         validate=validate.Range(min=0, min_inclusive=False))


class FuseOptionsSchema(Schema):
    images = fields.List(fields.String(), required=True, validate=validate.Length(min=2))
    model = fields.String(required=True)
    out = fields.String(required=True)
    grid = fields.Integer(load_default=DEFAULT_GRID, validate=validate.Range(min=1))
    overlap = fields.Integer(load_default=DEFAULT_OVERLAP, validate=validate.Range(min=0))
    threads = fields.Integer(allow_none=True, load_default=None, validate=validate.Range(min=1))


#Output Schemas
class RegionScoreMapSchema(Schema):
    candidates = fields.List(fields.String())
    grid = fields.Integer()
    overlap = fields.Integer()
    winners = fields.List(fields.List(fields.Integer()))
    scores = fields.List(fields.List(fields.Float()))
    candidate_scores = fields.List(fields.List(fields.List(fields.Float())))
