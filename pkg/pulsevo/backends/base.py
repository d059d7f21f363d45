from pulsevo.error import UnknownBackend
from pulsevo.fitness_lab import FitnessBackend
from pulsevo.utils import load_class_by_string

default_backend_types = {
    'sim': 'pulsevo.backends.simulator.SimulatorBackend',
    'toy': 'pulsevo.backends.toy.ToyBackend',
}


def available_backend_types(config):
    if config.replace_backends:
        return dict(config.backends)
    else:
        backends = {}
        backends.update(default_backend_types)
        backends.update(config.backends)
        return backends


def backend_class(config, backend_type=None):
    '''Looks up the class registered for ``backend_type``, which defaults to
    the configured backend.'''
    if backend_type is None:
        backend_type = config.backend
    backends = available_backend_types(config)
    cls_name = backends.get(backend_type)

    if cls_name is None:
        raise UnknownBackend(
            "Invalid backend type {}, must be one of: {}".format(
                backend_type, ', '.join(sorted(backends))))
    cls = load_class_by_string(cls_name)
    if not issubclass(cls, FitnessBackend):
        raise UnknownBackend(
            "{} is not a fitness backend".format(cls_name))
    return cls


def make_backend(config, backend_type=None):
    '''Builds the backend from the matching sections of the run config.

    :type config: :class:`pulsevo.config.RunConfig`
    '''
    return backend_class(config, backend_type).from_config(config)
