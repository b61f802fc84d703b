from marshmallow import Schema, fields, validate
from srqa.commands.features.constants import OUTPUT_FORMATS, DEFAULT_OUTPUT_FORMAT


#Input Schemas
class FeaturesOptionsSchema(Schema):
    image = fields.String(required=True)
    out = fields.String(allow_none=True, load_default=None)
    output_format = fields.String(load_default=DEFAULT_OUTPUT_FORMAT, validate=validate.OneOf(OUTPUT_FORMATS))
    no_cache = fields.Boolean(load_default=False)


class CacheWarmOptionsSchema(Schema):
    manifest = fields.String(required=True)


#Output Schemas
class FeatureRecordSchema(Schema):
    image = fields.String()
    extractor_version = fields.String()
    feature_count = fields.Integer()
    local = fields.Dict(keys=fields.String(), values=fields.Float())
    global_ = fields.Dict(keys=fields.String(), values=fields.Float(), data_key="global")
    spatial = fields.Dict(keys=fields.String(), values=fields.Float())
