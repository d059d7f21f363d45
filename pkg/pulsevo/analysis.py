'''
Post-run diagnostics computed from a :class:`pulsevo.runlog.RunLog`:
convergence curves, explored gene distributions, the spread of the
near-optimal solutions and the fit of efficiency against signal width.
'''
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from pulsevo.error import (
    EmptyRunLog, InvalidParameters, MixedEncodings, RankDeficientFit)
from pulsevo.ga_engine import GenerationRecord
from pulsevo.pulse_codec import space_for

FOUR_LN2 = 4 * np.log(2)
UNIQUE = 'unique'
EVALUATIONS = 'evaluations'


@dataclass(frozen=True)
class GeneDistribution(object):
    gene: int
    count: int
    min: float
    max: float
    q1: float
    median: float
    q3: float
    bin_edges: tuple
    counts: tuple

    @property
    def bin_centers(self):
        edges = np.asarray(self.bin_edges)
        return tuple(0.5 * (edges[:-1] + edges[1:]))


@dataclass(frozen=True)
class VarianceReport(object):
    variances: tuple
    subset_size: int
    threshold: float
    fraction: float


@dataclass(frozen=True)
class BandwidthFit(object):
    eta0: float
    gamma_fit: float
    residual: float
    points: tuple

    def __call__(self, fwhm):
        return bandwidth_model(fwhm, self.eta0, self.gamma_fit)


def _check_log(log):
    if len(log) == 0:
        raise EmptyRunLog('the run log has no records')
    encodings = set(r.encoding for r in log)
    if len(encodings) > 1:
        raise MixedEncodings(
            'run log mixes %s genomes' % ' and '.join(sorted(encodings)))
    return encodings.pop()


def convergence_report(log):
    '''
    Best-so-far fitness and the number of first-seen genomes for every
    generation in the log.
    '''
    if len(log) == 0:
        raise EmptyRunLog('the run log has no records')
    reports = []
    seen = set()
    best = None
    for generation in sorted(set(r.generation for r in log)):
        new = 0
        for record in log.generation(generation):
            if record.genome not in seen:
                seen.add(record.genome)
                new += 1
            if best is None or record.fitness > best.fitness:
                best = record
        reports.append(GenerationRecord(
            generation, best.fitness, new, best.genome))
    return reports


def _samples(log, weighting):
    if weighting == UNIQUE:
        records = log.unique()
    elif weighting == EVALUATIONS:
        records = list(log)
    else:
        raise InvalidParameters(
            'weighting must be %r or %r' % (UNIQUE, EVALUATIONS))
    return np.array([r.genome for r in records], dtype=float)


def gene_distributions(log, bins=20, weighting=UNIQUE):
    '''
    Summary statistics and a histogram per gene over the genomes explored
    during a run.

    :param int bins: Number of histogram bins spanning the gene domain.
    :param str weighting: ``unique`` counts every distinct genome once,
        ``evaluations`` counts every record, cache hits included.
    :returns: list of :class:`GeneDistribution`, one per gene.
    '''
    encoding = _check_log(log)
    samples = _samples(log, weighting)
    domains = space_for(encoding).domains
    distributions = []
    for i, domain in enumerate(domains):
        values = samples[:, i]
        lo, hi = domain.bounds
        lo, hi = min(lo, values.min()), max(hi, values.max())
        counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
        q1, median, q3 = np.percentile(values, [25, 50, 75])
        distributions.append(GeneDistribution(
            gene=i + 1,
            count=int(values.size),
            min=float(values.min()),
            max=float(values.max()),
            q1=float(q1),
            median=float(median),
            q3=float(q3),
            bin_edges=tuple(float(e) for e in edges),
            counts=tuple(int(c) for c in counts)))
    return distributions


def top_fraction_variance(log, fraction=0.9):
    '''
    Population variance of every gene over the distinct genomes whose
    fitness is at least ``best - (1 - fraction) * |best|``, i.e. within
    ``1 - fraction`` of the best fitness.
    '''
    _check_log(log)
    if not 0 < fraction <= 1:
        raise InvalidParameters('fraction must lie in (0, 1]')
    records = log.unique()
    best = max(r.fitness for r in records)
    threshold = best - (1 - fraction) * abs(best)
    subset = np.array(
        [r.genome for r in records if r.fitness >= threshold], dtype=float)
    return VarianceReport(
        variances=tuple(float(v) for v in np.var(subset, axis=0)),
        subset_size=len(subset),
        threshold=float(threshold),
        fraction=float(fraction))


def bandwidth_model(fwhm, eta0, gamma_fit):
    '''``eta0 / sqrt(1 + (4 ln2 / (fwhm * gamma_fit))^2)``'''
    fwhm = np.asarray(fwhm, dtype=float)
    return eta0 / np.sqrt(1 + (FOUR_LN2 / (fwhm * gamma_fit)) ** 2)


def bandwidth_fit(points):
    '''
    Least-squares fit of :func:`bandwidth_model` to ``(fwhm, eta)`` points.

    :raises RankDeficientFit: with fewer than 3 points or a single distinct
        width, which cannot separate the two parameters.
    '''
    points = tuple((float(w), float(e)) for w, e in points)
    if len(points) < 3:
        raise RankDeficientFit('need at least 3 points, got %d' % (
            len(points),))
    fwhm, eta = np.array(points).T
    if np.any(fwhm <= 0):
        raise InvalidParameters('signal widths must be positive')
    if np.ptp(fwhm) == 0:
        raise RankDeficientFit('all points share the width %r' % (fwhm[0],))

    def residuals(params):
        return bandwidth_model(fwhm, *params) - eta

    x0 = [np.clip(eta.max(), 1e-6, 0.999), FOUR_LN2 / np.median(fwhm)]
    result = least_squares(
        residuals, x0, bounds=([0.0, 1e-12], [1.0, np.inf]),
        x_scale='jac', ftol=1e-14, xtol=1e-14, gtol=1e-14, max_nfev=10000)
    eta0, gamma_fit = result.x
    return BandwidthFit(
        eta0=float(eta0),
        gamma_fit=float(gamma_fit),
        residual=float(np.linalg.norm(result.fun)),
        points=points)


def peak_separation(waveform, timing):
    '''Time from the control pulse peak to the signal center, positive when
    the control peaks first.'''
    peak = waveform.times[int(np.argmax(waveform.samples))]
    return float(timing.signal_center - peak)
