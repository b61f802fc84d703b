from marshmallow import Schema, fields, validate
from srqa.commands.model.schemas import ForestOptionsSchema
from srqa.commands.evaluate.constants import DEFAULT_REPORT_DIR
from srqa.core.constants import (DEFAULT_FOLDS, DEFAULT_IMAGE_HOLDOUT, DEFAULT_METHOD_HOLDOUT, DEFAULT_REPETITIONS,
                                 PROTOCOLS, SYNTH_DEFAULT_SCALES, SYNTH_DEFAULT_SOURCES, SYNTH_DEFAULT_SIZE,
                                 SYNTH_SCORE_GUIDE)


#Input Schemas
class EvaluateOptionsSchema(ForestOptionsSchema):
    manifest = fields.String(required=True)
    protocol = fields.String(load_default="5fold", validate=validate.OneOf(PROTOCOLS))
    folds = fields.Integer(load_default=DEFAULT_FOLDS, validate=validate.Range(min=2))
    image_holdout = fields.Integer(load_default=DEFAULT_IMAGE_HOLDOUT, validate=validate.Range(min=1))
    method_holdout = fields.Integer(load_default=DEFAULT_METHOD_HOLDOUT, validate=validate.Range(min=1))
    repetitions = fields.Integer(load_default=DEFAULT_REPETITIONS, validate=validate.Range(min=1))
    out = fields.String(load_default=DEFAULT_REPORT_DIR)


class AggregateOptionsSchema(Schema):
    ratings = fields.String(required=True)
    out = fields.String(required=True)


class SynthOptionsSchema(Schema):
    out_dir = fields.String(required=True)
    source = fields.List(fields.String(), load_default=list)
    scale = fields.List(fields.Integer(validate=validate.OneOf(sorted(SYNTH_SCORE_GUIDE))),
                        load_default=lambda: list(SYNTH_DEFAULT_SCALES))
    count = fields.Integer(load_default=SYNTH_DEFAULT_SOURCES, validate=validate.Range(min=1))
    size = fields.Integer(load_default=SYNTH_DEFAULT_SIZE, validate=validate.Range(min=64))
    seed = fields.Integer(load_default=0, validate=validate.Range(min=0))
