EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_BACKEND_ERROR = 2
EXIT_PARTIAL_SWEEP = 3


class PulsevoError(Exception):
    '''Generic error from which all other pulsevo errors inherit from'''
    name = 'PulsevoError'
    description = 'Generic pulsevo error'
    code = EXIT_BACKEND_ERROR


class ConfigSchemaError(PulsevoError):
    '''Raised when a config file or command line options do not match the
    config schema. ``errors`` holds one dict per violation.'''
    name = 'ConfigSchemaError'
    description = 'invalid config'
    code = EXIT_CONFIG_ERROR

    def __init__(self, errors):
        self.errors = errors
        super(ConfigSchemaError, self).__init__('; '.join(
            '%s: %s' % ('.'.join(map(str, e['path'])) or '<root>',
                        e['message'])
            for e in errors))


class InvalidGeneSpace(PulsevoError):
    name = 'InvalidGeneSpace'
    description = 'invalid gene space'
    code = EXIT_CONFIG_ERROR


class InvalidGenome(PulsevoError):
    name = 'InvalidGenome'
    description = 'genome outside of its gene space'


class InvalidWindow(PulsevoError):
    name = 'InvalidWindow'
    description = 'decode window shorter than two samples'
    code = EXIT_CONFIG_ERROR


class EncodingMismatch(PulsevoError):
    name = 'EncodingMismatch'
    description = 'genomes belong to different gene spaces'


class UnevaluatedIndividual(PulsevoError):
    '''Raised when selection is asked to rank an individual that has no
    fitness yet'''
    name = 'UnevaluatedIndividual'
    description = 'individual has not been evaluated'


class IntegratorInstability(PulsevoError):
    '''Raised when the integrator step exceeds the explicit stability bound
    for the requested rates'''
    name = 'IntegratorInstability'
    description = 'integrator step too large'


class BackendError(PulsevoError):
    name = 'BackendError'
    description = 'fitness backend failed'


class UnknownBackend(PulsevoError):
    name = 'UnknownBackend'
    description = 'unknown backend type'
    code = EXIT_CONFIG_ERROR


class UndefinedEfficiency(PulsevoError):
    name = 'UndefinedEfficiency'
    description = 'input energy is zero'


class WindowCoverageError(PulsevoError):
    name = 'WindowCoverageError'
    description = 'trace does not cover the integration windows'


class EfficiencyOutOfRange(PulsevoError):
    name = 'EfficiencyOutOfRange'
    description = 'efficiency outside of [0, 1]'


class EmptyRunLog(PulsevoError):
    name = 'EmptyRunLog'
    description = 'run log has no records'


class MixedEncodings(PulsevoError):
    name = 'MixedEncodings'
    description = 'run log mixes genome encodings'


class RankDeficientFit(PulsevoError):
    name = 'RankDeficientFit'
    description = 'fit points do not determine the model parameters'


class MissingReferenceRun(PulsevoError):
    name = 'MissingReferenceRun'
    description = 'reference run not found, run `pv optimize` first'
    code = EXIT_CONFIG_ERROR


class MissingArtifacts(PulsevoError):
    '''Raised when run artifacts are missing. ``missing`` lists the paths.'''
    name = 'MissingArtifacts'
    description = 'run artifacts missing'
    code = EXIT_CONFIG_ERROR

    def __init__(self, missing):
        self.missing = list(missing)
        super(MissingArtifacts, self).__init__(
            'missing: %s' % ', '.join(self.missing))


class PartialSweepFailure(PulsevoError):
    '''Raised after a sweep finished with at least one failed entry.
    ``failures`` maps the entry label to the error message.'''
    name = 'PartialSweepFailure'
    description = 'some sweep entries failed'
    code = EXIT_PARTIAL_SWEEP

    def __init__(self, failures):
        self.failures = dict(failures)
        super(PartialSweepFailure, self).__init__(
            '%d sweep entries failed: %s' % (
                len(self.failures), ', '.join(sorted(self.failures))))


class InvalidParameters(PulsevoError):
    '''Raised when simulation, timing or instrument parameters break their
    invariants'''
    name = 'InvalidParameters'
    description = 'invalid simulation parameters'
    code = EXIT_CONFIG_ERROR


class InvalidRunLogRecord(ConfigSchemaError):
    '''Raised when a line of a run log does not match the record schema'''
    name = 'InvalidRunLogRecord'
    description = 'invalid run log record'
    code = EXIT_BACKEND_ERROR
