import numpy as np

from pulsevo.analysis import (
    EVALUATIONS, UNIQUE, bandwidth_fit, bandwidth_model, convergence_report,
    gene_distributions, peak_separation, top_fraction_variance)
from pulsevo.error import (
    EmptyRunLog, InvalidParameters, MixedEncodings, RankDeficientFit)
from pulsevo.memory_sim import ExperimentTiming
from pulsevo.pulse_codec import Codec, GaussianGenome
from pulsevo.runlog import RunLog
from pulsevo.tests.helpers import PulsevoTestBase

A = (0.2, 10, -10)
B = (0.4, 20, -20)
C = (0.6, 30, -30)
D = (0.8, 40, -40)


class TestAnalysis(PulsevoTestBase):
    def setUp(self):
        self.log = self.make_runlog([
            (0, A, 1.0),
            (0, B, 2.0),
            (0, C, 4.0),
            (1, B, 2.0),
            (1, D, 3.8),
        ])

    def test_convergence(self):
        '''The convergence report tracks the best-so-far fitness and the
        first-seen genomes of every generation.'''
        report = convergence_report(self.log)
        self.assertEqual([r.generation for r in report], [0, 1])
        self.assertEqual([r.best_fitness for r in report], [4.0, 4.0])
        self.assertEqual([r.new_evaluations for r in report], [3, 1])
        self.assertEqual(report[1].best_genome, GaussianGenome(*C))

    def test_empty(self):
        '''Reports over an empty log are rejected.'''
        self.assertRaises(EmptyRunLog, convergence_report, RunLog())
        self.assertRaises(EmptyRunLog, gene_distributions, RunLog())
        self.assertRaises(EmptyRunLog, top_fraction_variance, RunLog())

    def test_mixed_encodings(self):
        '''A log mixing encodings cannot be summarized per gene.'''
        self.log.append(self.make_record(
            2, [0.5] * 16, 1.0, encoding='freeform'))
        self.assertRaises(MixedEncodings, gene_distributions, self.log)
        self.assertRaises(MixedEncodings, top_fraction_variance, self.log)

    def test_gene_distributions_unique(self):
        '''Every distinct genome counts once by default.'''
        amplitude, fwhm, delay = gene_distributions(self.log, bins=2)
        self.assertEqual(amplitude.gene, 1)
        self.assertEqual(amplitude.count, 4)
        self.assertEqual((amplitude.min, amplitude.max), (0.2, 0.8))
        self.assertAlmostEqual(amplitude.q1, 0.35)
        self.assertAlmostEqual(amplitude.median, 0.5)
        self.assertAlmostEqual(amplitude.q3, 0.65)
        self.assertEqual(amplitude.bin_edges, (0.0, 0.5, 1.0))
        self.assertEqual(amplitude.counts, (2, 2))
        self.assertEqual(amplitude.bin_centers, (0.25, 0.75))
        self.assertEqual(fwhm.bin_edges, (1.0, 40.5, 80.0))
        self.assertEqual(fwhm.counts, (3, 1))
        self.assertEqual(delay.gene, 3)
        self.assertEqual(delay.counts, (1, 3))

    def test_gene_distributions_evaluations(self):
        '''With evaluation weighting every record counts, cache hits
        included.'''
        amplitude = gene_distributions(
            self.log, bins=2, weighting=EVALUATIONS)[0]
        self.assertEqual(amplitude.count, 5)
        self.assertEqual(amplitude.counts, (3, 2))
        self.assertAlmostEqual(amplitude.median, 0.4)

    def test_gene_distributions_weighting(self):
        '''Unknown weightings are rejected.'''
        self.assertEqual(UNIQUE, 'unique')
        self.assertRaises(
            InvalidParameters, gene_distributions, self.log,
            weighting='all')

    def test_top_fraction_variance(self):
        '''The variance covers the distinct genomes within 10% of the best
        fitness.'''
        report = top_fraction_variance(self.log, 0.9)
        self.assertEqual(report.subset_size, 2)
        self.assertAlmostEqual(report.threshold, 3.6)
        a, f, d = report.variances
        self.assertAlmostEqual(a, 0.01)
        self.assertAlmostEqual(f, 25.0)
        self.assertAlmostEqual(d, 25.0)

    def test_top_fraction_single(self):
        '''A fraction of 1 keeps only the best genome, with zero
        variance.'''
        report = top_fraction_variance(self.log, 1.0)
        self.assertEqual(report.subset_size, 1)
        self.assertEqual(report.variances, (0.0, 0.0, 0.0))

    def test_top_fraction_negative_fitness(self):
        '''The threshold uses the magnitude of a negative best fitness.'''
        log = self.make_runlog([(0, A, -1.0), (0, B, -1.05), (0, C, -2.0)])
        report = top_fraction_variance(log, 0.9)
        self.assertAlmostEqual(report.threshold, -1.1)
        self.assertEqual(report.subset_size, 2)

    def test_top_fraction_range(self):
        '''Fractions outside (0, 1] are rejected.'''
        self.assertRaises(
            InvalidParameters, top_fraction_variance, self.log, 0.0)
        self.assertRaises(
            InvalidParameters, top_fraction_variance, self.log, 1.5)

    def test_peak_separation(self):
        '''The separation is positive when the control peaks before the
        signal.'''
        waveform = Codec().decode(GaussianGenome(1.0, 20, -20))
        self.assertEqual(peak_separation(waveform, ExperimentTiming()), 20.0)


class TestBandwidthFit(PulsevoTestBase):
    widths = np.linspace(2.0, 80.0, 20)

    def test_noiseless(self):
        '''Noiseless points are fitted exactly.'''
        eta = bandwidth_model(self.widths, 0.6, 0.15)
        fit = bandwidth_fit(zip(self.widths, eta))
        self.assertAlmostEqual(fit.eta0, 0.6, places=6)
        self.assertAlmostEqual(fit.gamma_fit, 0.15, places=6)
        self.assertTrue(fit.residual < 1e-10)
        self.assertEqual(len(fit.points), 20)
        self.assertAlmostEqual(float(fit(10.0)), float(
            bandwidth_model(10.0, 0.6, 0.15)))

    def test_noisy(self):
        '''Points with 1% noise recover the parameters within 5%.'''
        rng = np.random.default_rng(0)
        eta = bandwidth_model(self.widths, 0.6, 0.15)
        eta = eta * (1 + 0.01 * rng.standard_normal(eta.size))
        fit = bandwidth_fit(zip(self.widths, eta))
        self.assertTrue(abs(fit.eta0 / 0.6 - 1) < 0.05)
        self.assertTrue(abs(fit.gamma_fit / 0.15 - 1) < 0.05)

    def test_model_limits(self):
        '''Wide signals approach eta0 and the model halves the squared
        efficiency where fwhm * gamma = 4 ln2.'''
        self.assertAlmostEqual(
            float(bandwidth_model(1e9, 0.6, 0.15)), 0.6)
        width = 4 * np.log(2) / 0.15
        self.assertAlmostEqual(
            float(bandwidth_model(width, 0.6, 0.15)), 0.6 / np.sqrt(2))

    def test_too_few_points(self):
        '''Fewer than 3 points cannot be fitted.'''
        self.assertRaises(
            RankDeficientFit, bandwidth_fit, [(10.0, 0.3), (20.0, 0.4)])

    def test_single_width(self):
        '''Points sharing one width cannot separate the parameters.'''
        self.assertRaises(
            RankDeficientFit, bandwidth_fit,
            [(10.0, 0.3), (10.0, 0.31), (10.0, 0.29)])

    def test_non_positive_width(self):
        '''Widths must be positive.'''
        self.assertRaises(
            InvalidParameters, bandwidth_fit,
            [(0.0, 0.3), (10.0, 0.31), (20.0, 0.4)])
