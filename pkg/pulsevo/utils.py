import hashlib
import importlib
import json


def conjoin(a, b):
    result = {}
    result.update(a)
    result.update(b)
    return result


def deep_conjoin(a, b):
    '''Like :func:`conjoin`, but merges nested dicts key by key instead of
    replacing them.'''
    result = dict(a)
    for key, value in b.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = deep_conjoin(result[key], value)
        else:
            result[key] = value
    return result


def omit(collection, *fields):
    return dict((k, v) for k, v in collection.items() if k not in fields)


def omit_nones(d):
    return dict((k, v) for k, v in d.items() if v is not None)


def overrides(target, source, mappings):
    for to_key, from_key in mappings.items():
        if from_key in source:
            target[to_key] = source[from_key]


def load_class_by_string(class_path):
    '''Returns the class at the dotted path ``class_path``, e.g.
    ``"pulsevo.backends.toy.ToyBackend"``.'''
    module_path, _, class_name = class_path.rpartition('.')
    module = importlib.import_module(module_path)
    return getattr(module, class_name)


def derive_seed(root_seed, *key):
    '''
    Derive a per-entry seed from ``root_seed`` and a stable hash of ``key``.

    The hash is taken over the JSON form of ``key``, so it is stable across
    interpreter runs (unlike :func:`hash`).

    :param int root_seed: The seed of the whole sweep.
    :param key: Values identifying the sweep entry, such as the width and
        encoding.
    :returns: int -- A non-negative seed below 2**32.
    '''
    digest = hashlib.sha256(
        json.dumps(list(key), sort_keys=True).encode('utf-8')).hexdigest()
    return (int(root_seed) + int(digest[:8], 16)) % (2 ** 32)


def format_float(value):
    '''Formats a number with full round-trip precision.'''
    return repr(float(value))
