import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from pulsevo.error import (
    EncodingMismatch, InvalidGeneSpace, InvalidGenome, InvalidWindow)
from pulsevo.pulse_codec import (
    FREEFORM, GAUSSIAN, Codec, FiniteDomain, FreeformGenome, GaussianGenome,
    GeneSpace, IntervalDomain, TimeWindow, Waveform, amplitude_grid,
    check_same_encoding, control_point_times, decode_freeform,
    decode_gaussian, freeform_space, gaussian_profile, gaussian_space,
    make_genome, random_genome, sample_times, scale_genome, space_for,
    waveform_area)
from pulsevo.tests.helpers import PulsevoTestBase


class TestGeneSpaces(PulsevoTestBase):
    def test_amplitude_grid(self):
        '''The amplitude grid has 50 evenly spaced levels from 0 to 1.'''
        grid = amplitude_grid()
        self.assertEqual(len(grid), 50)
        self.assertEqual(grid[0], 0.0)
        self.assertEqual(grid[-1], 1.0)
        self.assertAlmostEqual(grid[1], 1.0 / 49)

    def test_gaussian_space(self):
        '''The gaussian space has 50 amplitudes, fwhms 1..80 and delays
        -60..0.'''
        space = gaussian_space()
        self.assertEqual(space.encoding, GAUSSIAN)
        self.assertEqual(space.genes, 3)
        amplitudes, fwhms, delays = space.domains
        self.assertEqual(len(amplitudes.values), 50)
        self.assertEqual(fwhms.values, tuple(range(1, 81)))
        self.assertEqual(delays.values, tuple(range(-60, 1)))

    def test_freeform_space(self):
        '''The free-form space has 16 interval genes in [-0.2, 1].'''
        space = freeform_space()
        self.assertEqual(space.encoding, FREEFORM)
        self.assertEqual(space.genes, 16)
        for domain in space.domains:
            self.assertEqual(domain.bounds, (-0.2, 1.0))

    def test_space_for(self):
        '''space_for returns the default space of an encoding and rejects
        unknown ones.'''
        self.assertEqual(space_for(GAUSSIAN), gaussian_space())
        self.assertEqual(space_for(FREEFORM), freeform_space())
        self.assertRaises(InvalidGeneSpace, space_for, 'square')

    def test_empty_finite_domain(self):
        '''An empty finite domain is rejected.'''
        self.assertRaises(InvalidGeneSpace, FiniteDomain, ())

    def test_unsorted_finite_domain(self):
        '''A finite domain must be sorted without duplicates.'''
        self.assertRaises(InvalidGeneSpace, FiniteDomain, (2, 1))
        self.assertRaises(InvalidGeneSpace, FiniteDomain, (1, 1))

    def test_degenerate_interval(self):
        '''An interval domain needs lo < hi.'''
        self.assertRaises(InvalidGeneSpace, IntervalDomain, 1.0, 1.0)

    def test_wrong_gene_count(self):
        '''A gene space with the wrong number of domains is rejected.'''
        self.assertRaises(
            InvalidGeneSpace, GeneSpace, GAUSSIAN,
            (FiniteDomain((1,)), FiniteDomain((1,))))

    def test_random_genome_in_space(self):
        '''Random genomes always lie in their gene space.'''
        rng = np.random.default_rng(3)
        for space in (gaussian_space(), freeform_space()):
            for _ in range(50):
                genome = random_genome(space, rng)
                self.assertTrue(space.contains(genome))
                self.assertEqual(genome.encoding, space.encoding)

    def test_random_genome_deterministic(self):
        '''The same seed gives the same random genome.'''
        space = freeform_space()
        a = random_genome(space, np.random.default_rng(7))
        b = random_genome(space, np.random.default_rng(7))
        self.assertEqual(a, b)

    def test_amplitude_draws_cover_grid(self):
        '''Uniform draws from the amplitude grid reach every level.'''
        domain = gaussian_space().domains[0]
        rng = np.random.default_rng(8)
        drawn = set(domain.draw(rng) for _ in range(10000))
        self.assertEqual(len(domain.values), 50)
        self.assertEqual(drawn, set(domain.values))

    def test_interval_draw_quartiles(self):
        '''Interval draws are uniform: their quartiles sit at a quarter,
        half and three quarters of the range.'''
        domain = IntervalDomain(-0.2, 1.0)
        rng = np.random.default_rng(9)
        draws = [domain.draw(rng) for _ in range(10000)]
        span = domain.hi - domain.lo
        for q in (25, 50, 75):
            expected = domain.lo + span * q / 100.0
            self.assertTrue(
                abs(np.percentile(draws, q) - expected) <= 0.02 * span)

    def test_validate(self):
        '''validate rejects genomes outside of the space.'''
        space = gaussian_space()
        genome = GaussianGenome(amplitude_grid()[10], 20, -10)
        self.assertEqual(space.validate(genome), genome)
        self.assertRaises(
            InvalidGenome, space.validate, GaussianGenome(0.5, 20, -10))
        self.assertRaises(
            InvalidGenome, space.validate, GaussianGenome(0.0, 20, 5))
        self.assertRaises(
            InvalidGenome, space.validate, FreeformGenome([0.0] * 16))


class TestGenomes(PulsevoTestBase):
    def test_make_genome(self):
        '''make_genome builds the genome type of an encoding.'''
        g = make_genome(GAUSSIAN, [0.5, 10, -5])
        self.assertEqual(g, GaussianGenome(0.5, 10, -5))
        self.assertEqual(g.encoding, GAUSSIAN)
        f = make_genome(FREEFORM, [0.1] * 16)
        self.assertTrue(isinstance(f, FreeformGenome))
        self.assertEqual(f.encoding, FREEFORM)
        self.assertRaises(InvalidGeneSpace, make_genome, 'square', [1])

    def test_genomes_are_hashable(self):
        '''Genomes with equal genes hash equally.'''
        a = make_genome(FREEFORM, [0.25] * 16)
        b = make_genome(FREEFORM, [0.25] * 16)
        self.assertEqual(len(set([a, b])), 1)

    def test_check_same_encoding(self):
        '''Genomes of different encodings are reported as a mismatch.'''
        g = GaussianGenome(0.5, 10, -5)
        f = FreeformGenome([0.5] * 16)
        check_same_encoding(g, g)
        self.assertRaises(EncodingMismatch, check_same_encoding, g, f)

    def test_scale_gaussian(self):
        '''Scaling a gaussian genome only scales its amplitude.'''
        g = scale_genome(GaussianGenome(0.8, 10, -5), 0.5)
        self.assertEqual(g, GaussianGenome(0.4, 10, -5))

    def test_scale_freeform(self):
        '''Scaling a free-form genome scales every control point.'''
        f = scale_genome(FreeformGenome([0.4] * 16), 0.5)
        self.assertTrue(isinstance(f, FreeformGenome))
        self.assertEqual(list(f), [0.2] * 16)


class TestDecoding(PulsevoTestBase):
    window = TimeWindow(-120.0, 40.0)

    def test_window_order(self):
        '''A window must start before it ends.'''
        self.assertRaises(InvalidWindow, TimeWindow, 1.0, 1.0)

    def test_sample_times(self):
        '''Samples fall on start + k*dt inside the window.'''
        times = sample_times(self.window, 1.0)
        self.assertEqual(times.size, 161)
        self.assertEqual(times[0], -120.0)
        self.assertEqual(times[-1], 40.0)

    def test_short_window(self):
        '''A window holding a single sample is rejected.'''
        self.assertRaises(
            InvalidWindow, sample_times, TimeWindow(0.0, 0.5), 1.0)
        self.assertRaises(InvalidWindow, sample_times, self.window, 0.0)

    def test_decode_gaussian(self):
        '''The decoded gaussian peaks at its delay with amplitude a and has
        the requested fwhm.'''
        wf = decode_gaussian(GaussianGenome(0.8, 20, -30), self.window)
        peak = int(np.argmax(wf.samples))
        self.assertEqual(wf.times[peak], -30.0)
        self.assertAlmostEqual(wf.samples[peak], 0.8)
        half = wf.samples[list(wf.times).index(-20.0)]
        self.assertAlmostEqual(half, 0.4)

    def test_decode_gaussian_zero_amplitude(self):
        '''A zero amplitude gaussian decodes to all zeros.'''
        wf = decode_gaussian(GaussianGenome(0.0, 20, -30), self.window)
        self.assertEqual(wf.samples.max(), 0.0)

    def test_decode_freeform_interpolates(self):
        '''The free-form spline passes through the control points.'''
        values = [0.1 * (i % 5) for i in range(16)]
        window = TimeWindow(0.0, 150.0)
        wf = decode_freeform(FreeformGenome(values), window, dt=1.0)
        knots = control_point_times(window)
        for t, x in zip(knots, values):
            self.assertAlmostEqual(wf.samples[int(t)], x)

    def test_decode_freeform_clips(self):
        '''Negative control points are clipped to zero.'''
        wf = decode_freeform(FreeformGenome([-0.2] * 16), self.window)
        self.assertEqual(wf.samples.max(), 0.0)
        wf = decode_freeform(FreeformGenome([1.0] * 16), self.window)
        self.assertTrue(np.allclose(wf.samples, 1.0))

    def test_decode_freeform_smoothing(self):
        '''A positive smoothing weight flattens the spline.'''
        values = [0.0, 1.0] * 8
        rough = decode_freeform(FreeformGenome(values), self.window)
        smooth = decode_freeform(
            FreeformGenome(values), self.window, smoothing=1e6)
        self.assertTrue(np.ptp(smooth.samples) < np.ptp(rough.samples))

    def test_decode_freeform_negative_smoothing(self):
        '''Negative smoothing weights are rejected.'''
        self.assertRaises(
            InvalidGenome, decode_freeform, FreeformGenome([0.5] * 16),
            self.window, smoothing=-1.0)

    def test_waveform_bounds(self):
        '''Waveform samples must lie in [0, 1].'''
        self.assertRaises(InvalidGenome, Waveform, 0.0, 1.0, [0.0, 1.5])
        self.assertRaises(InvalidWindow, Waveform, 0.0, 1.0, [0.5])
        self.assertRaises(InvalidWindow, Waveform, 0.0, 0.0, [0.5, 0.5])

    def test_waveform_area(self):
        '''The area of a constant waveform is its height times its
        length.'''
        wf = Waveform(0.0, 0.5, [0.5] * 11)
        self.assertAlmostEqual(waveform_area(wf), 2.5)
        self.assertEqual(wf.t_end, 5.0)

    def test_codec(self):
        '''The codec decodes either encoding with its own window.'''
        codec = Codec(TimeWindow(-10.0, 10.0), dt_sample=0.5)
        g = codec.decode(GaussianGenome(1.0, 4, 0))
        f = codec.decode(FreeformGenome([0.5] * 16))
        self.assertEqual(g.samples.size, 41)
        self.assertEqual(f.samples.size, 41)
        self.assertAlmostEqual(codec.area(FreeformGenome([0.5] * 16)), 10.0)
        self.assertTrue(np.array_equal(
            codec.decode_all([GaussianGenome(1.0, 4, 0)])[0].samples,
            g.samples))

    def test_codec_rejects_short_window(self):
        '''A codec with a window too short to sample is rejected.'''
        self.assertRaises(
            InvalidWindow, Codec, TimeWindow(0.0, 0.5), dt_sample=1.0)

    def test_gaussian_area_closed_form(self):
        '''The sampled area of a gaussian matches a f sqrt(pi / 4 ln2) and
        a fine numerical integral.'''
        genome = GaussianGenome(0.5, 20, -30)
        area = waveform_area(decode_gaussian(genome, self.window))
        closed = 0.5 * 20 * np.sqrt(np.pi / (4 * np.log(2)))
        self.assertAlmostEqual(closed, 10.64, places=2)
        self.assertTrue(abs(area - closed) <= 0.005 * closed)
        fine, _ = quad(
            gaussian_profile, self.window.start, self.window.end,
            args=(0.5, 20, -30), points=[-30.0])
        self.assertAlmostEqual(area, fine, places=6)

    def test_alternating_freeform_dips_before_clipping(self):
        '''Alternating control points make the spline dip below zero, and
        the decoded waveform is clipped to exactly zero there.'''
        values = [-0.2, 1.0] * 8
        genome = FreeformGenome(values)
        wf = decode_freeform(genome, self.window)
        spline = CubicSpline(
            control_point_times(self.window), values, bc_type='natural')
        raw = spline(wf.times)
        self.assertTrue(raw.min() < 0)
        self.assertEqual(wf.samples.min(), 0.0)
        self.assertTrue(np.array_equal(wf.samples, np.clip(raw, 0, 1)))

    def test_area_scales_linearly(self):
        '''Scaling the amplitude genes scales the waveform area by the same
        factor while no sample is clipped.'''
        codec = Codec()
        freeform = FreeformGenome(
            [0.5 + 0.3 * np.sin(i / 2.5) for i in range(16)])
        for genome in (GaussianGenome(0.8, 30, -20), freeform):
            area = codec.area(genome)
            for scale in (0.25, 0.5, 0.9):
                self.assertAlmostEqual(
                    codec.area(scale_genome(genome, scale)), scale * area)

    def test_decode_deterministic(self):
        '''Decoding the same genome twice gives identical samples.'''
        codec = Codec()
        for genome in (GaussianGenome(0.6, 12, -40),
                       FreeformGenome([0.1 * (i % 7) for i in range(16)])):
            first = codec.decode(genome)
            second = codec.decode(make_genome(genome.encoding, list(genome)))
            self.assertTrue(np.array_equal(first.samples, second.samples))
            self.assertEqual(first.t_start, second.t_start)
