from jsonschema import Draft4Validator

from pulsevo.error import ConfigSchemaError, InvalidRunLogRecord

number = {'type': 'number'}
positive = {'type': 'number', 'exclusiveMinimum': True, 'minimum': 0}
non_negative = {'type': 'number', 'minimum': 0}
count = {'type': 'integer', 'minimum': 0}
nullable_count = {'type': ['integer', 'null'], 'minimum': 0}


def section(properties):
    return {
        'type': 'object',
        'properties': properties,
        'additionalProperties': False,
    }


GA_SCHEMA = section({
    'genes': {'type': 'integer', 'enum': [3, 16]},
    'generations': {'type': 'integer', 'minimum': 1},
    'population_size': {'type': 'integer', 'minimum': 1},
    'parents_mating': {'type': 'integer', 'minimum': 2},
    'tournament_size': {'type': 'integer', 'minimum': 1},
    'elitism_size': count,
    'children_per_generation': nullable_count,
    'mutation_probability': {'type': 'number', 'minimum': 0, 'maximum': 1},
    'rng_seed': nullable_count,
    'early_stop_generations': count,
})

SIM_SCHEMA = section({
    'optical_depth': positive,
    'gamma': non_negative,
    'gamma_s': non_negative,
    'detuning': number,
    'omega_max': non_negative,
    'n_z': {'type': 'integer', 'minimum': 2},
    'dt_int': positive,
    'trace_dt': positive,
})

TIMING_SCHEMA = section({
    'storage_time': positive,
    'read_fwhm': positive,
    'signal_center': number,
    'trace_span': {'type': ['number', 'null'], 'minimum': 0},
})

SIGNAL_SCHEMA = section({
    'fwhm': positive,
    'amplitude': non_negative,
})

INSTRUMENT_SCHEMA = section({
    'aom_rise_time': non_negative,
})

CODEC_SCHEMA = section({
    'window_start': number,
    'window_end': number,
    'dt_sample': positive,
    'smoothing': non_negative,
})

FITNESS_SCHEMA = section({
    'tap_fraction': {
        'type': 'number', 'exclusiveMinimum': True, 'minimum': 0,
        'maximum': 1},
})

TOY_SCHEMA = section({
    'kind': {'type': 'string', 'enum': [
        'quadratic', 'amplitude', 'constant', 'area']},
    'gaussian_target': {
        'type': ['array', 'null'], 'items': number,
        'minItems': 3, 'maxItems': 3},
    'freeform_target': {
        'type': ['array', 'null'], 'items': number,
        'minItems': 16, 'maxItems': 16},
    'value': number,
})

CONFIG_SCHEMA = section({
    'encoding': {'type': 'string', 'enum': ['gaussian', 'freeform']},
    'encodings': {
        'type': 'array', 'minItems': 1, 'uniqueItems': True,
        'items': {'type': 'string', 'enum': ['gaussian', 'freeform']}},
    'backend': {'type': 'string'},
    'backends': {
        'type': 'object', 'additionalProperties': {'type': 'string'}},
    'replace_backends': {'type': 'boolean'},
    'ga': GA_SCHEMA,
    'sim': SIM_SCHEMA,
    'timing': TIMING_SCHEMA,
    'signal': SIGNAL_SCHEMA,
    'instrument': INSTRUMENT_SCHEMA,
    'codec': CODEC_SCHEMA,
    'fitness': FITNESS_SCHEMA,
    'toy': TOY_SCHEMA,
    'widths': {'type': 'array', 'minItems': 1, 'items': positive},
    'alphas': {
        'type': 'array', 'minItems': 1,
        'items': {
            'type': 'number', 'exclusiveMinimum': True, 'minimum': 0,
            'maximum': 1}},
    'reference_dir': {'type': ['string', 'null']},
    'reference_dirs': {
        'type': 'object',
        'properties': {
            'gaussian': {'type': 'string'},
            'freeform': {'type': 'string'},
        },
        'additionalProperties': False},
    'output_dir': {'type': 'string'},
    'seed': count,
    'logfile': {'type': ['string', 'null']},
    'sentry_dsn': {'type': ['string', 'null']},
})

RUNLOG_RECORD_SCHEMA = {
    'type': 'object',
    'required': [
        'generation', 'encoding', 'genome', 'fitness', 'eta', 'beta', 'area',
        'new'],
    'properties': {
        'generation': count,
        'encoding': {'type': 'string', 'enum': ['gaussian', 'freeform']},
        'genome': {'type': 'array', 'items': number, 'minItems': 3},
        'fitness': number,
        'eta': {'type': ['number', 'null']},
        'beta': {'type': 'number', 'minimum': 1},
        'area': {'type': ['number', 'null']},
        'new': {'type': 'boolean'},
    },
    'additionalProperties': False,
}


def schema_errors(schema, data):
    '''Every violation of ``schema`` by ``data``, ordered by path.'''
    validator = Draft4Validator(schema)
    errors = [{
        'type': 'invalid_config',
        'message': e.message,
        'path': list(e.absolute_path),
        'schema_path': list(e.schema_path),
    } for e in validator.iter_errors(data)]
    return sorted(errors, key=lambda e: [str(p) for p in e['path']])


def validate_config(data):
    '''Raises :class:`ConfigSchemaError` listing every invalid field.'''
    errors = schema_errors(CONFIG_SCHEMA, data)
    if errors:
        raise ConfigSchemaError(errors)
    return data


def validate_record(data):
    errors = schema_errors(RUNLOG_RECORD_SCHEMA, data)
    if errors:
        raise InvalidRunLogRecord(errors)
    return data
