'''
Objective functions: the internal memory efficiency, the proxy fitness used
while optimizing, and the energy-constrained wrapper that renormalizes
pulses whose electrical area exceeds a budget.
'''
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from pulsevo.error import (
    BackendError, EfficiencyOutOfRange, InvalidParameters,
    UndefinedEfficiency, WindowCoverageError)
from pulsevo.pulse_codec import scale_genome

EPS_TIME = 1e-9
AREA_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EfficiencyResult(object):
    eta_int: float
    retrieved_energy: float
    input_energy: float
    input_window: tuple
    output_window: tuple


def window_energy(time, intensity, lo, hi):
    '''Trapezoid integral of ``intensity`` over the samples in [lo, hi).'''
    time = np.asarray(time)
    dt = float(time[1] - time[0])
    if time[0] > lo + EPS_TIME or time[-1] < hi - dt - EPS_TIME:
        raise WindowCoverageError(
            'trace [%r, %r] does not cover window [%r, %r)' % (
                time[0], time[-1], lo, hi))
    mask = (time >= lo - EPS_TIME) & (time < hi - EPS_TIME)
    values = np.asarray(intensity)[mask]
    if values.size < 2:
        return 0.0
    return float(trapezoid(values, dx=dt))


def _window_energies(trace, timing):
    retrieved = window_energy(trace.time, trace.output_intensity,
                              *timing.output_window)
    injected = window_energy(trace.time, trace.input_intensity,
                             *timing.input_window)
    if not injected > 0:
        raise UndefinedEfficiency('input energy is zero')
    return retrieved, injected


def internal_efficiency(trace, timing):
    '''
    Retrieved energy in ``[t0 + dt/2, t0 + 3dt/2)`` over input energy in
    ``[t0 - dt/2, t0 + dt/2)``, where ``dt`` is the storage time.

    :raises EfficiencyOutOfRange: if the ratio leaves [0, 1]; it is never
        clipped.
    '''
    retrieved, injected = _window_energies(trace, timing)
    eta = retrieved / injected
    if not 0.0 <= eta <= 1.0:
        raise EfficiencyOutOfRange('eta_int = %r' % (eta,))
    return EfficiencyResult(
        eta, retrieved, injected,
        timing.input_window, timing.output_window)


def proxy_fitness(trace, timing, tap_fraction=1.0):
    '''
    Retrieved energy normalized by the energy seen on an input tap that
    picks off ``tap_fraction`` of the signal. With the whole input as the
    tap this equals the internal efficiency.
    '''
    if not 0 < tap_fraction <= 1:
        raise InvalidParameters('tap_fraction must lie in (0, 1]')
    retrieved, injected = _window_energies(trace, timing)
    return retrieved / (tap_fraction * injected)


@dataclass(frozen=True)
class EnergyConstraint(object):
    '''Budget of ``alpha * i_max`` on the decoded electrical pulse area.'''
    i_max: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise InvalidParameters('alpha must lie in (0, 1]')
        if not self.i_max > 0:
            raise InvalidParameters('i_max must be positive')

    @property
    def limit(self):
        return self.alpha * self.i_max


def constrain_genome(genome, constraint, codec):
    '''
    Renormalizes ``genome`` onto the area budget.

    Genomes within budget come back unchanged with ``beta = 1``. Otherwise
    the amplitude genes are divided by ``beta = I(genome) / limit``. When
    clipping at 1 makes the area non-linear in the scale, the scale is
    refined by root finding so the area lands on the limit.

    :returns: (scaled genome, beta, decoded area of the scaled genome)
    '''
    area = codec.area(genome)
    limit = constraint.limit
    if area <= limit:
        return genome, 1.0, area

    scale = limit / area
    scaled = scale_genome(genome, scale)
    scaled_area = codec.area(scaled)
    if abs(scaled_area - limit) > AREA_TOLERANCE * limit:
        scale = brentq(
            lambda s: codec.area(scale_genome(genome, s)) - limit,
            0.0, scale, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        scaled = scale_genome(genome, scale)
        scaled_area = codec.area(scaled)
    while scaled_area > limit * (1 + AREA_TOLERANCE):
        scale *= 1 - AREA_TOLERANCE
        scaled = scale_genome(genome, scale)
        scaled_area = codec.area(scaled)
    return scaled, 1.0 / scale, scaled_area


@dataclass(frozen=True, eq=False)
class Evaluation(object):
    '''The score a backend gives one genome.'''
    fitness: Optional[float] = None
    eta: Optional[float] = None
    beta: float = 1.0
    area: Optional[float] = None
    trace: Optional[object] = None
    error: Optional[Exception] = None

    @property
    def ok(self):
        return self.error is None


class FitnessBackend(object):
    '''
    Base class for fitness backends. A backend maps genomes to
    :class:`Evaluation` objects and must be deterministic given its own
    configuration.

    :param codec: Decodes genomes into waveforms.
    :type codec: :class:`pulsevo.pulse_codec.Codec`
    '''
    name = 'base'

    def __init__(self, codec):
        self.codec = codec

    @classmethod
    def from_config(cls, config):
        '''Builds the backend from a :class:`pulsevo.config.RunConfig`.'''
        raise NotImplementedError()

    def evaluate_batch(self, genomes):
        '''Returns one :class:`Evaluation` per genome, in input order. Must
        be implemented by subclasses.'''
        raise NotImplementedError()

    def evaluate(self, genome):
        [evaluation] = self.evaluate_batch([genome])
        if not evaluation.ok:
            raise BackendError(str(evaluation.error))
        return evaluation

    def trace(self, genome):
        '''Returns a trace for ``genome`` if the backend produces one.'''
        return self.evaluate(genome).trace


class ConstrainedBackend(FitnessBackend):
    '''Wraps another backend so that every evaluated waveform respects an
    :class:`EnergyConstraint`. The population keeps the original genomes;
    only the evaluated copy is renormalized.'''
    name = 'constrained'

    def __init__(self, inner, constraint):
        super(ConstrainedBackend, self).__init__(inner.codec)
        self.inner = inner
        self.constraint = constraint

    def evaluate_batch(self, genomes):
        constrained = [
            constrain_genome(g, self.constraint, self.codec) for g in genomes]
        evaluations = self.inner.evaluate_batch(
            [scaled for scaled, _, _ in constrained])
        return [
            replace(e, beta=beta, area=area)
            for e, (_, beta, area) in zip(evaluations, constrained)]


def energy_constrained_fitness(genome, constraint, codec, backend):
    '''
    Scores ``genome`` under the area budget.

    :returns: (fitness, beta)
    '''
    scaled, beta, _ = constrain_genome(genome, constraint, codec)
    return backend.evaluate(scaled).fitness, beta
