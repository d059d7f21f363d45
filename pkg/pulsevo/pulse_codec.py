'''
Genome encodings for write control pulses and their decoding into sampled
waveforms.

Two encodings exist: a Gaussian described by amplitude, FWHM and delay
(``a``, ``f``, ``d``) on discrete grids, and a free-form pulse described by
16 control points joined by a cubic spline. All times are in ns relative to
the signal pulse center.
'''
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline, make_smoothing_spline

from pulsevo.error import (
    InvalidGeneSpace, InvalidGenome, InvalidWindow, EncodingMismatch)

GAUSSIAN = 'gaussian'
FREEFORM = 'freeform'
ENCODINGS = (GAUSSIAN, FREEFORM)

GENE_COUNTS = {GAUSSIAN: 3, FREEFORM: 16}

FOUR_LN2 = 4 * np.log(2)

AMPLITUDE_LEVELS = 50
FWHM_RANGE = (1, 80)
DELAY_RANGE = (-60, 0)
FREEFORM_RANGE = (-0.2, 1.0)

DEFAULT_WINDOW = (-120.0, 40.0)
DEFAULT_DT = 1.0


@dataclass(frozen=True)
class FiniteDomain(object):
    '''A gene that takes one of a finite, sorted set of values.'''
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise InvalidGeneSpace('finite gene domain is empty')
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise InvalidGeneSpace(
                'finite gene domain must be sorted and duplicate-free')

    def draw(self, rng):
        return self.values[int(rng.integers(len(self.values)))]

    def __contains__(self, value):
        return value in self.values

    @property
    def bounds(self):
        return (self.values[0], self.values[-1])


@dataclass(frozen=True)
class IntervalDomain(object):
    '''A gene that takes any real value in the closed interval [lo, hi].'''
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidGeneSpace(
                'interval gene domain needs lo < hi, got [%r, %r]' % (
                    self.lo, self.hi))

    def draw(self, rng):
        return float(rng.uniform(self.lo, self.hi))

    def __contains__(self, value):
        return self.lo <= value <= self.hi

    @property
    def bounds(self):
        return (self.lo, self.hi)


class GaussianGenome(NamedTuple):
    a: float
    f: float
    d: float

    encoding = GAUSSIAN


class FreeformGenome(tuple):
    '''The 16 control point amplitudes x_1..x_16 of a free-form pulse.'''
    encoding = FREEFORM

    def __new__(cls, values):
        return super(FreeformGenome, cls).__new__(cls, values)

    def __repr__(self):
        return 'FreeformGenome(%s)' % (list(self),)


GENOME_TYPES = {GAUSSIAN: GaussianGenome, FREEFORM: FreeformGenome}


def make_genome(encoding, values):
    '''Builds a genome of the given encoding from a sequence of gene
    values.'''
    if encoding == GAUSSIAN:
        return GaussianGenome(*values)
    if encoding == FREEFORM:
        return FreeformGenome(values)
    raise InvalidGeneSpace('unknown encoding %r' % (encoding,))


@dataclass(frozen=True)
class GeneSpace(object):
    '''The domain of every gene of one encoding.'''
    encoding: str
    domains: tuple

    def __post_init__(self):
        expected = GENE_COUNTS.get(self.encoding)
        if expected is None:
            raise InvalidGeneSpace('unknown encoding %r' % (self.encoding,))
        if len(self.domains) != expected:
            raise InvalidGeneSpace(
                '%s gene space needs %d genes, got %d' % (
                    self.encoding, expected, len(self.domains)))

    @property
    def genes(self):
        return len(self.domains)

    def make(self, values):
        return make_genome(self.encoding, values)

    def contains(self, genome):
        return (
            getattr(genome, 'encoding', None) == self.encoding and
            len(genome) == self.genes and
            all(v in dom for v, dom in zip(genome, self.domains)))

    def validate(self, genome):
        if not self.contains(genome):
            raise InvalidGenome(
                '%r is not in the %s gene space' % (genome, self.encoding))
        return genome


def amplitude_grid(levels=AMPLITUDE_LEVELS):
    '''``levels`` evenly spaced amplitudes including both 0 and 1.'''
    return tuple(float(v) for v in np.linspace(0.0, 1.0, levels))


def gaussian_space(amplitudes=None, fwhms=None, delays=None):
    '''The Gaussian gene space. Defaults: 50 amplitude levels, FWHM 1..80 ns
    and delay -60..0 ns in 1 ns steps.'''
    if amplitudes is None:
        amplitudes = amplitude_grid()
    if fwhms is None:
        fwhms = range(FWHM_RANGE[0], FWHM_RANGE[1] + 1)
    if delays is None:
        delays = range(DELAY_RANGE[0], DELAY_RANGE[1] + 1)
    return GeneSpace(GAUSSIAN, (
        FiniteDomain(tuple(amplitudes)),
        FiniteDomain(tuple(fwhms)),
        FiniteDomain(tuple(delays))))


def freeform_space(lo=FREEFORM_RANGE[0], hi=FREEFORM_RANGE[1]):
    '''The free-form gene space: 16 control points, each in [lo, hi].'''
    return GeneSpace(FREEFORM, tuple(
        IntervalDomain(lo, hi) for _ in range(GENE_COUNTS[FREEFORM])))


def space_for(encoding):
    if encoding == GAUSSIAN:
        return gaussian_space()
    if encoding == FREEFORM:
        return freeform_space()
    raise InvalidGeneSpace('unknown encoding %r' % (encoding,))


def random_genome(space, rng):
    '''Draws every gene uniformly from its domain.'''
    return space.make([domain.draw(rng) for domain in space.domains])


@dataclass(frozen=True)
class TimeWindow(object):
    start: float
    end: float

    def __post_init__(self):
        if not self.start < self.end:
            raise InvalidWindow(
                'window start %r must precede end %r' % (self.start, self.end))


@dataclass(frozen=True, eq=False)
class Waveform(object):
    '''Uniformly sampled, normalized drive amplitude.'''
    t_start: float
    dt_sample: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if not self.dt_sample > 0:
            raise InvalidWindow('sample period must be positive')
        if samples.ndim != 1 or samples.size < 2:
            raise InvalidWindow('a waveform needs at least 2 samples')
        if samples.min() < 0 or samples.max() > 1:
            raise InvalidGenome('waveform samples must lie in [0, 1]')
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def times(self):
        return self.t_start + self.dt_sample * np.arange(self.samples.size)

    @property
    def t_end(self):
        return self.t_start + self.dt_sample * (self.samples.size - 1)


def sample_times(window, dt):
    '''Sample times ``window.start + k*dt`` that fall inside the window.'''
    if not dt > 0:
        raise InvalidWindow('sample period must be positive, got %r' % (dt,))
    n = int(np.floor((window.end - window.start) / dt + 1e-9)) + 1
    if n < 2:
        raise InvalidWindow(
            'window [%r, %r] holds fewer than 2 samples at dt=%r' % (
                window.start, window.end, dt))
    return window.start + dt * np.arange(n)


def gaussian_profile(times, a, f, d):
    return a * np.exp(-FOUR_LN2 * (times - d) ** 2 / f ** 2)


def decode_gaussian(genome, window, dt=DEFAULT_DT):
    '''
    Samples ``a * exp(-4 ln2 (t - d)^2 / f^2)`` over the window.

    Amplitudes off the 50-level grid are accepted so that energy-constrained
    evaluation can rescale ``a``; only the physical ranges are enforced.
    '''
    a, f, d = genome
    if not 0 <= a <= 1 or not f > 0:
        raise InvalidGenome('gaussian genome %r out of range' % (genome,))
    times = sample_times(window, dt)
    samples = np.clip(gaussian_profile(times, a, f, d), 0.0, 1.0)
    return Waveform(float(window.start), float(dt), samples)


def control_point_times(window, count=GENE_COUNTS[FREEFORM]):
    return np.linspace(window.start, window.end, count)


def freeform_spline(genome, window, smoothing=0.0):
    '''The unclipped spline through the control points. ``smoothing`` is the
    penalty weight of a cubic smoothing spline; 0 gives the natural
    interpolating spline.'''
    knots = control_point_times(window, len(genome))
    values = np.asarray(genome, dtype=float)
    if smoothing < 0:
        raise InvalidGenome('smoothing must be non-negative')
    if smoothing == 0:
        return CubicSpline(knots, values, bc_type='natural')
    return make_smoothing_spline(knots, values, lam=smoothing)


def decode_freeform(genome, window, dt=DEFAULT_DT, smoothing=0.0):
    '''Samples the control point spline and clips it to [0, 1].'''
    if len(genome) != GENE_COUNTS[FREEFORM]:
        raise InvalidGenome('free-form genome needs 16 points')
    times = sample_times(window, dt)
    spline = freeform_spline(genome, window, smoothing)
    samples = np.clip(spline(times), 0.0, 1.0)
    return Waveform(float(window.start), float(dt), samples)


def waveform_area(waveform):
    '''Trapezoid integral of the samples over time.'''
    return float(trapezoid(waveform.samples, dx=waveform.dt_sample))


def scale_genome(genome, scale):
    '''Scales the amplitude degrees of freedom of a genome: ``a`` for a
    Gaussian, every control point for a free-form pulse.'''
    if genome.encoding == GAUSSIAN:
        return genome._replace(a=genome.a * scale)
    return FreeformGenome(x * scale for x in genome)


def check_same_encoding(a, b):
    if (getattr(a, 'encoding', None) != getattr(b, 'encoding', None) or
            len(a) != len(b)):
        raise EncodingMismatch('%r and %r differ in encoding' % (a, b))


class Codec(object):
    '''
    Decodes genomes of either encoding with one window, sample period and
    spline smoothing.

    :param window: The decode window.
    :type window: :class:`TimeWindow`
    :param float dt_sample: The sample period in ns.
    :param float smoothing: The free-form spline smoothing weight.
    '''

    def __init__(self, window=None, dt_sample=DEFAULT_DT, smoothing=0.0):
        if window is None:
            window = TimeWindow(*DEFAULT_WINDOW)
        self.window = window
        self.dt_sample = float(dt_sample)
        self.smoothing = float(smoothing)
        # fail early on windows that cannot be sampled
        sample_times(self.window, self.dt_sample)

    def decode(self, genome):
        if genome.encoding == GAUSSIAN:
            return decode_gaussian(genome, self.window, self.dt_sample)
        return decode_freeform(
            genome, self.window, self.dt_sample, self.smoothing)

    def area(self, genome):
        return waveform_area(self.decode(genome))

    def decode_all(self, genomes: Sequence):
        return [self.decode(g) for g in genomes]
