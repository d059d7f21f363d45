'''
Orchestration of whole experiments: single optimizations, signal width and
energy budget sweeps, re-analysis of finished runs and the CSV bundles that
plots are drawn from.

Every command takes the raw config dict (file values merged with command
line flags); each run resolves it and writes a snapshot of the result into
its own directory.
'''
from dataclasses import dataclass
import logging
import os

from pulsevo import analysis, export, ga_engine
from pulsevo.backends import make_backend
from pulsevo.config import (
    codec, experiment_timing, field_values, instrument_model, resolve,
    run_config, with_overrides)
from pulsevo.error import (
    InvalidParameters, MissingArtifacts, MissingReferenceRun,
    PartialSweepFailure, PulsevoError, RankDeficientFit)
from pulsevo.fitness_lab import (
    ConstrainedBackend, EnergyConstraint, constrain_genome)
from pulsevo.memory_sim import filtered_drive_area
from pulsevo.pulse_codec import make_genome, space_for
from pulsevo.runlog import RUNLOG_FILENAME, RunLog, read_runlog
from pulsevo.utils import derive_seed, format_float

log = logging.getLogger(__name__)

CONFIG_FILENAME = 'config.yaml'
GENERATIONS_FILENAME = 'generations.jsonl'
BEST_FILENAME = 'best_genome.json'
TRACE_FILENAME = 'best_trace.csv'
SUMMARY_FILENAME = 'summary.csv'
BANDWIDTH_FILENAME = 'bandwidth_fit.csv'
ANALYSIS_FILENAME = 'analysis.csv'
PLOTS_DIRNAME = 'plots'
BANDWIDTH_CURVE_POINTS = 200


@dataclass(frozen=True)
class RunArtifacts(object):
    '''The files of one optimization run.'''
    directory: str

    def path(self, filename):
        return os.path.join(self.directory, filename)

    @property
    def config(self):
        return self.path(CONFIG_FILENAME)

    @property
    def runlog(self):
        return self.path(RUNLOG_FILENAME)

    @property
    def generations(self):
        return self.path(GENERATIONS_FILENAME)

    @property
    def best_genome(self):
        return self.path(BEST_FILENAME)

    @property
    def trace(self):
        return self.path(TRACE_FILENAME)

    @property
    def required(self):
        return [self.config, self.runlog, self.generations, self.best_genome]

    def missing(self):
        return [p for p in self.required if not os.path.exists(p)]

    def best(self):
        return export.read_json(self.best_genome)

    def best_genome_value(self):
        best = self.best()
        return make_genome(best['encoding'], best['genome'])

    def load_config(self):
        return run_config(export.load_yaml(self.config))


@dataclass(frozen=True)
class SweepSummary(object):
    directory: str
    header: tuple
    rows: list

    @property
    def summary(self):
        return os.path.join(self.directory, SUMMARY_FILENAME)


def _record_for(runlog, genome):
    for record in reversed(runlog.records):
        if record.genome == genome:
            return record


def cmd_optimize(data, constraint=None):
    '''
    Runs one optimization and persists its artifacts into the configured
    output directory.

    :param dict data: The raw config.
    :param constraint: An optional area budget every evaluated waveform
        must respect.
    :type constraint: :class:`pulsevo.fitness_lab.EnergyConstraint`
    :returns: :class:`RunArtifacts`
    '''
    settings = resolve(data)
    config = run_config(settings)
    artifacts = RunArtifacts(config.output_dir)
    export.write_yaml(artifacts.config, settings)

    space = space_for(config.encoding)
    backend = make_backend(config)
    if constraint is not None:
        backend = ConstrainedBackend(backend, constraint)
    log.info('Optimizing %s pulses with the %s backend into %s',
             config.encoding, config.backend, artifacts.directory)

    runlog = RunLog.open(artifacts.runlog)
    try:
        result = ga_engine.run(space, backend, config.section('ga'), runlog)
    finally:
        runlog.close()

    export.write_jsonl(artifacts.generations, [
        export.generation_record_dict(r) for r in result.records])
    record = _record_for(result.log, result.best.genome)
    export.write_json(artifacts.best_genome, {
        'encoding': config.encoding,
        'genome': list(result.best.genome),
        'fitness': result.best.fitness,
        'eta': record.eta,
        'beta': record.beta,
        'area': record.area,
        'alpha': None if constraint is None else constraint.alpha,
        'i_max': None if constraint is None else constraint.i_max,
    })

    trace = backend.trace(result.best.genome)
    if trace is not None:
        export.write_csv(
            artifacts.trace, export.TRACE_HEADER, export.trace_rows(trace))

    log.info('Best fitness %s for genome %r',
             format_float(result.best.fitness), tuple(result.best.genome))
    return artifacts


def _unique_values(values, name):
    unique = []
    for value in values:
        if value in unique:
            log.warning('Ignoring duplicate %s %r', name, value)
        else:
            unique.append(value)
    return unique


def _entry_label(prefix, value, encoding):
    return '%s-%s-%s' % (prefix, format_float(value), encoding)


def _entry_eta(best):
    return best['eta'] if best['eta'] is not None else best['fitness']


def cmd_sweep_width(data):
    '''
    Optimizes every configured encoding for every signal width in
    ``widths``, then fits the bandwidth model per encoding.

    Failing entries are logged and skipped; :class:`PartialSweepFailure` is
    raised once the sweep is over if any entry failed.
    '''
    config = run_config(resolve(data))
    root = config.output_dir
    widths = _unique_values([float(w) for w in config.widths], 'width')
    encodings = list(config.encodings)
    failures = {}
    rows = []
    for width in widths:
        row = [width]
        for encoding in encodings:
            label = _entry_label('fwhm', width, encoding)
            entry = with_overrides(
                data, encoding=encoding, signal={'fwhm': width},
                ga={'rng_seed': derive_seed(config.seed, width, encoding)},
                output_dir=os.path.join(root, label))
            log.info('Sweep entry %s', label)
            try:
                row.append(_entry_eta(cmd_optimize(entry).best()))
            except PulsevoError as e:
                log.error('Sweep entry %s failed: %s', label, e)
                failures[label] = str(e)
                row.append(None)
        rows.append(row)

    header = tuple(['fwhm'] + ['eta_%s' % e for e in encodings])
    summary = SweepSummary(root, header, rows)
    export.write_csv(summary.summary, header, rows)
    write_bandwidth_fits(root, header, rows)

    if failures:
        raise PartialSweepFailure(failures)
    return summary


def bandwidth_fits(header, rows):
    '''Fits the bandwidth model to every ``eta_<encoding>`` column of a
    width sweep summary with enough points.'''
    fits = {}
    for i, column in enumerate(header[1:], 1):
        points = [(row[0], row[i]) for row in rows if row[i] is not None]
        encoding = column[len('eta_'):]
        try:
            fits[encoding] = analysis.bandwidth_fit(points)
        except RankDeficientFit as e:
            log.warning('No bandwidth fit for %s: %s', encoding, e)
    return fits


def write_bandwidth_fits(directory, header, rows):
    fits = bandwidth_fits(header, rows)
    return export.write_csv(
        os.path.join(directory, BANDWIDTH_FILENAME),
        ('encoding', 'eta0', 'gamma_fit', 'residual', 'points'),
        [(encoding, fit.eta0, fit.gamma_fit, fit.residual, len(fit.points))
         for encoding, fit in sorted(fits.items())])


def reference_runs(config):
    '''
    The (encoding, reference run directory) pairs an energy sweep covers.
    ``reference_dirs`` needs a run for every encoding in ``encodings``;
    a lone ``reference_dir`` sweeps the encoding of its run.

    :raises MissingReferenceRun: if no reference run is configured for an
        encoding.
    '''
    if config.reference_dirs:
        missing = [
            e for e in config.encodings if e not in config.reference_dirs]
        if missing:
            raise MissingReferenceRun(
                'no reference run configured for %s; run `pv optimize` for '
                'each encoding and list its output directory in '
                'reference_dirs' % (', '.join(missing),))
        return [(e, config.reference_dirs[e]) for e in config.encodings]
    if config.reference_dir is None:
        raise MissingReferenceRun(
            'no reference_dir configured; run `pv optimize` first and pass '
            'its output directory')
    return [(None, config.reference_dir)]


def reference_area(reference_dir, sweep_codec=None, encoding=None):
    '''The decoded area of the best genome of an unconstrained run.

    :param sweep_codec: The codec section the sweep decodes candidates
        with. The reference run must have used the same one.
    :param str encoding: The encoding the reference run must have
        optimized, or ``None`` to accept either.
    :returns: (encoding, area)
    :raises MissingReferenceRun: if the run directory is incomplete.
    :raises InvalidParameters: if the reference run does not fit the sweep.
    '''
    reference = RunArtifacts(reference_dir)
    if reference.missing():
        raise MissingReferenceRun(
            'reference run %s is incomplete (missing %s); run `pv optimize` '
            'first' % (reference_dir, ', '.join(reference.missing())))
    genome = reference.best_genome_value()
    if encoding is not None and genome.encoding != encoding:
        raise InvalidParameters(
            'reference run %s optimized %s pulses, not %s' % (
                reference_dir, genome.encoding, encoding))
    config = reference.load_config()
    reference_codec = field_values(config.section('codec'))
    if sweep_codec is not None and reference_codec != sweep_codec:
        raise InvalidParameters(
            'reference run %s decodes with %r but the sweep uses %r' % (
                reference_dir, reference_codec, sweep_codec))
    area = codec(config).area(genome)
    if not area > 0:
        raise InvalidParameters(
            'the reference pulse of %s has no area' % (reference_dir,))
    return genome.encoding, area


def cmd_sweep_energy(data):
    '''
    Re-optimizes every swept encoding under area budgets of
    ``alpha * i_max`` for every ``alpha`` in ``alphas``, where ``i_max`` is
    the area of the best pulse of that encoding's reference run.

    Every reference run is checked before the first entry starts. Failing
    entries are logged and skipped; :class:`PartialSweepFailure` is raised
    once the sweep is over if any entry failed.
    '''
    config = run_config(resolve(data))
    sweep_codec = field_values(config.section('codec'))
    references = [
        reference_area(directory, sweep_codec, encoding)
        for encoding, directory in reference_runs(config)]
    root = config.output_dir
    instrument = instrument_model(config)
    entry_codec = codec(config)
    alphas = _unique_values([float(a) for a in config.alphas], 'alpha')
    failures = {}
    rows = []
    for encoding, i_max in references:
        log.info('Sweeping %s pulses below a reference area of %s',
                 encoding, format_float(i_max))
        for alpha in alphas:
            label = _entry_label('alpha', alpha, encoding)
            entry = with_overrides(
                data, encoding=encoding,
                ga={'rng_seed': derive_seed(config.seed, alpha, encoding)},
                output_dir=os.path.join(root, label))
            constraint = EnergyConstraint(i_max, alpha)
            log.info('Sweep entry %s (area budget %s)', label,
                     format_float(constraint.limit))
            try:
                artifacts = cmd_optimize(entry, constraint=constraint)
            except PulsevoError as e:
                log.error('Sweep entry %s failed: %s', label, e)
                failures[label] = str(e)
                rows.append([encoding, alpha, None, None, None, None, None])
                continue
            best = artifacts.best()
            scaled, beta, area = constrain_genome(
                artifacts.best_genome_value(), constraint, entry_codec)
            optical = filtered_drive_area(
                entry_codec.decode(scaled), instrument)
            rows.append([
                encoding, alpha, _entry_eta(best), best['fitness'], beta,
                area / i_max, optical])

    header = ('encoding', 'alpha', 'eta', 'fitness', 'beta', 'area_fraction',
              'optical_energy')
    summary = SweepSummary(root, header, rows)
    export.write_csv(summary.summary, header, rows)
    if failures:
        raise PartialSweepFailure(failures)
    return summary


@dataclass(frozen=True)
class RunReport(object):
    '''Every analysis of one finished run.'''
    convergence: list
    distributions: list
    variance: object
    best: dict
    peak_separation: float


def analyze_run(directory, bins=20, weighting=analysis.UNIQUE,
                fraction=0.9):
    artifacts = RunArtifacts(directory)
    missing = artifacts.missing()
    if missing:
        raise MissingArtifacts(missing)
    config = artifacts.load_config()
    runlog = read_runlog(artifacts.runlog)
    best = artifacts.best()
    waveform = codec(config).decode(artifacts.best_genome_value())
    return RunReport(
        convergence=analysis.convergence_report(runlog),
        distributions=analysis.gene_distributions(runlog, bins, weighting),
        variance=analysis.top_fraction_variance(runlog, fraction),
        best=best,
        peak_separation=analysis.peak_separation(
            waveform, experiment_timing(config)))


def cmd_analyze(directory, bins=20, weighting=analysis.UNIQUE,
                fraction=0.9):
    '''Recomputes the reports of a finished run from its persisted run log
    and writes their summary to ``analysis.csv``.'''
    report = analyze_run(directory, bins, weighting, fraction)
    last = report.convergence[-1]
    export.write_csv(
        os.path.join(directory, ANALYSIS_FILENAME),
        ('encoding', 'generations', 'best_fitness', 'best_eta',
         'unique_genomes', 'top_subset_size', 'peak_separation'),
        [(report.best['encoding'], len(report.convergence),
          last.best_fitness, report.best['eta'],
          sum(r.new_evaluations for r in report.convergence),
          report.variance.subset_size, report.peak_separation)])
    log.info('Analyzed %s: best fitness %s after %d generations',
             directory, format_float(last.best_fitness),
             len(report.convergence))
    return report


def _convergence_rows(report, runlog):
    etas = {}
    for record in runlog:
        etas.setdefault(record.genome, record.eta)
    return [
        (r.generation, r.best_fitness, etas.get(r.best_genome),
         r.new_evaluations)
        for r in report.convergence]


def _violin_rows(report):
    best = report.best['genome']
    for dist in report.distributions:
        for center, count in zip(dist.bin_centers, dist.counts):
            yield (dist.gene, center, count, best[dist.gene - 1])


def _best_pulse_rows(report, decoder):
    for record in report.convergence:
        waveform = decoder.decode(record.best_genome)
        for t, value in zip(waveform.times, waveform.samples):
            yield (record.generation, t, value)


def emit_run_plots(directory, bins=20, weighting=analysis.UNIQUE):
    '''Writes the plot data of one run into its ``plots`` directory.

    :returns: list of the written paths.
    '''
    artifacts = RunArtifacts(directory)
    report = analyze_run(directory, bins, weighting)
    runlog = read_runlog(artifacts.runlog)
    decoder = codec(artifacts.load_config())
    plots = os.path.join(directory, PLOTS_DIRNAME)

    def path(name):
        return os.path.join(plots, name)

    written = [
        export.write_csv(
            path('convergence.csv'),
            ('generation', 'best_fitness', 'best_eta', 'new_evaluations'),
            _convergence_rows(report, runlog)),
        export.write_csv(
            path('violin.csv'),
            ('gene', 'bin_center', 'count', 'best_value'),
            _violin_rows(report)),
        export.write_csv(
            path('variance.csv'),
            ('gene', 'variance', 'subset_size', 'threshold'),
            [(i + 1, v, report.variance.subset_size,
              report.variance.threshold)
             for i, v in enumerate(report.variance.variances)]),
        export.write_csv(
            path('best_pulses.csv'),
            ('generation', 'time', 'amplitude'),
            _best_pulse_rows(report, decoder)),
    ]
    traces = []
    if os.path.exists(artifacts.trace):
        traces = [
            [float(row[k]) for k in export.TRACE_HEADER]
            for row in export.read_csv(artifacts.trace)]
    written.append(export.write_csv(
        path('traces.csv'), export.TRACE_HEADER, traces))
    return written


def _read_width_summary(directory):
    rows = export.read_csv(os.path.join(directory, SUMMARY_FILENAME))
    if not rows or 'fwhm' not in rows[0]:
        return None, None
    header = tuple(rows[0].keys())
    return header, [
        [float(row[k]) if row[k] != '' else None for k in header]
        for row in rows]


def emit_bandwidth_plot(directory, header, rows):
    fits = bandwidth_fits(header, rows)
    widths = [row[0] for row in rows]
    grid = [
        min(widths) + (max(widths) - min(widths)) * i /
        (BANDWIDTH_CURVE_POINTS - 1)
        for i in range(BANDWIDTH_CURVE_POINTS)]
    return export.write_csv(
        os.path.join(directory, PLOTS_DIRNAME, BANDWIDTH_FILENAME),
        ('encoding', 'fwhm', 'eta_fit', 'eta0', 'gamma_fit'),
        [(encoding, w, float(fit(w)), fit.eta0, fit.gamma_fit)
         for encoding, fit in sorted(fits.items()) for w in grid])


def cmd_emit_plots(directory, bins=20, weighting=analysis.UNIQUE):
    '''
    Writes the CSV data behind every plot. ``directory`` is either a run
    directory or a sweep directory; for a sweep, every entry run is
    emitted too and a width sweep also gets the fitted bandwidth curve.

    :raises MissingArtifacts: listing every missing file.
    '''
    if not os.path.exists(os.path.join(directory, SUMMARY_FILENAME)):
        return emit_run_plots(directory, bins, weighting)

    entries = sorted(
        os.path.join(directory, name) for name in os.listdir(directory)
        if os.path.isdir(os.path.join(directory, name)) and
        name != PLOTS_DIRNAME)
    missing = []
    for entry in entries:
        missing.extend(RunArtifacts(entry).missing())
    if missing:
        raise MissingArtifacts(missing)

    written = []
    for entry in entries:
        written.extend(emit_run_plots(entry, bins, weighting))
    header, rows = _read_width_summary(directory)
    if header is not None:
        written.append(emit_bandwidth_plot(directory, header, rows))
    return written
