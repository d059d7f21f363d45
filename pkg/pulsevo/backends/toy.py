'''
Analytic stand-ins for the storage experiment, cheap enough to run whole
optimizations in tests.
'''
import numpy as np

from pulsevo import config as conf
from pulsevo.error import InvalidParameters, PulsevoError
from pulsevo.fitness_lab import Evaluation, FitnessBackend
from pulsevo.pulse_codec import (
    FREEFORM, GAUSSIAN, GENE_COUNTS, amplitude_grid)

DEFAULT_GAUSSIAN_TARGET = (amplitude_grid()[30], 40, -20)
DEFAULT_FREEFORM_TARGET = (0.5,) * GENE_COUNTS[FREEFORM]

KINDS = ('quadratic', 'amplitude', 'constant', 'area')


def gaussian_quadratic(genome, target):
    '''-(a - a*)^2 - (f - f*)^2 / 6400 - (d - d*)^2 / 3600, which peaks at
    0 on the target.'''
    a, f, d = genome
    ta, tf, td = target
    return -((a - ta) ** 2 + (f - tf) ** 2 / 6400.0 + (d - td) ** 2 / 3600.0)


def freeform_quadratic(genome, target):
    return -float(np.sum(
        (np.asarray(genome, dtype=float) - np.asarray(target)) ** 2))


def first_gene_quadratic(genome, target):
    return -(float(genome[0]) - float(target[0])) ** 2


class ToyBackend(FitnessBackend):
    '''
    :param str kind: ``quadratic`` peaks at a target genome and
        ``amplitude`` only scores the first gene against it. ``constant``
        scores every genome the same and ``area`` scores a genome by the area
        of its decoded waveform.
    '''
    name = 'toy'

    def __init__(self, codec, kind='quadratic', gaussian_target=None,
                 freeform_target=None, value=1.0):
        super(ToyBackend, self).__init__(codec)
        if kind not in KINDS:
            raise InvalidParameters('unknown toy objective %r' % (kind,))
        self.kind = kind
        self.targets = {
            GAUSSIAN: tuple(gaussian_target or DEFAULT_GAUSSIAN_TARGET),
            FREEFORM: tuple(freeform_target or DEFAULT_FREEFORM_TARGET),
        }
        self.value = float(value)

    @classmethod
    def from_config(cls, config):
        toy = config.section('toy')
        return cls(
            conf.codec(config), kind=toy.kind,
            gaussian_target=toy.gaussian_target,
            freeform_target=toy.freeform_target, value=toy.value)

    def score(self, genome):
        if self.kind == 'constant':
            return self.value
        if self.kind == 'area':
            return self.codec.area(genome)
        if self.kind == 'amplitude':
            return first_gene_quadratic(
                genome, self.targets[genome.encoding])
        if genome.encoding == GAUSSIAN:
            return gaussian_quadratic(genome, self.targets[GAUSSIAN])
        return freeform_quadratic(genome, self.targets[FREEFORM])

    def evaluate_batch(self, genomes):
        evaluations = []
        for genome in genomes:
            try:
                evaluations.append(Evaluation(
                    fitness=float(self.score(genome)),
                    area=self.codec.area(genome)))
            except PulsevoError as e:
                evaluations.append(Evaluation(error=e))
        return evaluations
