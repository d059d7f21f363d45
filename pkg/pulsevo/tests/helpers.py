import os
from copy import deepcopy

from twisted.trial.unittest import TestCase

from pulsevo.backends.toy import ToyBackend
from pulsevo.config import GAConfig
from pulsevo.error import BackendError
from pulsevo.fitness_lab import Evaluation, FitnessBackend
from pulsevo.pulse_codec import Codec, make_genome
from pulsevo.runlog import RunLog, RunLogRecord

SLOW_TESTS = bool(os.environ.get('PULSEVO_SLOW_TESTS'))
SKIP_SLOW = (
    None if SLOW_TESTS else 'set PULSEVO_SLOW_TESTS=1 to run slow tests')


class DummyLogFile(object):
    '''Dummy log file used for testing. Keeps written lines in memory and
    counts flushes.'''
    def __init__(self):
        self.data = b''
        self.flushed = 0
        self.closed_count = 0

    @property
    def lines(self):
        return self.data.decode('utf-8').splitlines()

    def write(self, data):
        self.data += data

    def flush(self):
        self.flushed += 1

    def close(self):
        self.closed_count += 1


class CountingBackend(FitnessBackend):
    '''Wraps another backend and records every genome it is asked to
    score.'''
    name = 'counting'

    def __init__(self, inner):
        super(CountingBackend, self).__init__(inner.codec)
        self.inner = inner
        self.calls = []

    @property
    def genomes(self):
        return [g for batch in self.calls for g in batch]

    def evaluate_batch(self, genomes):
        self.calls.append(list(genomes))
        return self.inner.evaluate_batch(genomes)


class FailingBackend(CountingBackend):
    '''Fails every genome from the ``fail_on``-th batch onwards.'''
    name = 'failing'

    def __init__(self, inner, fail_on=1):
        super(FailingBackend, self).__init__(inner)
        self.fail_on = fail_on

    def evaluate_batch(self, genomes):
        if len(self.calls) >= self.fail_on:
            self.calls.append(list(genomes))
            return [Evaluation(error=BackendError('boom')) for _ in genomes]
        return super(FailingBackend, self).evaluate_batch(genomes)


class PulsevoTestBase(TestCase):
    '''Base test case that all pulsevo tests inherit from. Contains useful
    helper functions'''

    default_ga = {
        'population_size': 10,
        'parents_mating': 4,
        'tournament_size': 3,
        'elitism_size': 2,
        'generations': 4,
    }

    # A short experiment on a thin medium that simulates in well under a
    # second.
    fast_sim = {
        'sim': {
            'optical_depth': 4.0,
            'n_z': 12,
            'dt_int': 0.05,
            'trace_dt': 0.25,
        },
        'timing': {
            'storage_time': 40.0,
            'read_fwhm': 10.0,
        },
        'signal': {
            'fwhm': 6.0,
        },
        'instrument': {
            'aom_rise_time': 3.0,
        },
        'codec': {
            'window_start': -30.0,
            'window_end': 10.0,
        },
    }

    def ga_config(self, **kw):
        data = deepcopy(self.default_ga)
        data.setdefault('genes', 16)
        data.update(kw)
        return GAConfig(data)

    def toy_data(self, output_dir=None, **changes):
        '''A raw run config for the toy backend with a small GA.'''
        data = {
            'backend': 'toy',
            'encoding': 'gaussian',
            'ga': deepcopy(self.default_ga),
        }
        if output_dir is None:
            output_dir = self.mktemp()
        data['output_dir'] = output_dir
        data.update(changes)
        return data

    def sim_data(self, output_dir=None, **changes):
        '''A raw run config for a fast simulator run.'''
        data = deepcopy(self.fast_sim)
        data.update(self.toy_data(output_dir, backend='sim'))
        data.update(changes)
        return data

    def toy_backend(self, kind='quadratic', **kw):
        return ToyBackend(Codec(), kind=kind, **kw)

    def make_record(self, generation, genome, fitness, encoding='gaussian',
                    new=True, eta=None, beta=1.0, area=None):
        return RunLogRecord(
            generation=generation,
            encoding=encoding,
            genome=make_genome(encoding, genome),
            fitness=fitness,
            eta=eta,
            beta=beta,
            area=area,
            new=new)

    def make_runlog(self, entries, encoding='gaussian'):
        '''Builds a run log from ``(generation, genome, fitness)``
        triples.'''
        log = RunLog()
        seen = set()
        for generation, genome, fitness in entries:
            genome = make_genome(encoding, genome)
            log.append(self.make_record(
                generation, genome, fitness, encoding,
                new=genome not in seen))
            seen.add(genome)
        return log
