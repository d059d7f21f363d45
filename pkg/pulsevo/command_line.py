import argparse
import logging
import logging.handlers
import os
import sys

import yaml
from confmodel.errors import ConfigError
from raven import Client

from pulsevo import runner
from pulsevo.analysis import EVALUATIONS, UNIQUE
from pulsevo.error import (
    EXIT_BACKEND_ERROR, EXIT_CONFIG_ERROR, EXIT_OK, PulsevoError)
from pulsevo.utils import (
    conjoin, deep_conjoin, format_float, omit_nones, overrides)
from pulsevo.validate import validate_config

log = logging.getLogger(__name__)

COMMANDS = {
    'optimize': runner.cmd_optimize,
    'sweep-width': runner.cmd_sweep_width,
    'sweep-energy': runner.cmd_sweep_energy,
}


def add_config_arguments(parser):
    parser.add_argument(
        '--config', '-c', dest='config_filename', type=str,
        help='Path to config file. Optional. Command line options override '
             'config options')
    parser.add_argument(
        '--output-dir', '-o', dest='output_dir', type=str,
        help='The directory to write run artifacts to. Defaults to "runs"')
    parser.add_argument(
        '--seed', '-s', dest='seed', type=int,
        help='The root random seed. Defaults to 0')
    parser.add_argument(
        '--backend', '-b', dest='backend', type=str,
        help='The fitness backend type, "sim" or "toy". Defaults to "sim"')
    parser.add_argument(
        '--encoding', '-e', dest='encoding', type=str,
        choices=['gaussian', 'freeform'],
        help='The genome encoding. Defaults to "freeform"')
    parser.add_argument(
        '--generations', '-g', dest='generations', type=int,
        help='The number of generations. Defaults to 50 for free-form and '
             '25 for gaussian genomes')
    parser.add_argument(
        '--backends', dest='backends', type=str, action='append',
        help='Add a mapping to the list of backends, in the format '
        '"backend_type:python_class".')


def add_logging_arguments(parser):
    parser.add_argument(
        '--log-file', '-l', dest='logfile', type=str,
        help='The file to log to. Defaults to not logging to a file')
    parser.add_argument(
        '--sentry-dsn', '-sd', dest='sentry_dsn', type=str,
        help='The DSN to log exceptions to. Defaults to not logging')


def add_analysis_arguments(parser):
    parser.add_argument(
        'directory', type=str,
        help='The run (or sweep) directory to read')
    parser.add_argument(
        '--bins', dest='bins', type=int, default=20,
        help='The number of histogram bins per gene. Defaults to 20')
    parser.add_argument(
        '--weighting', dest='weighting', type=str, default=UNIQUE,
        choices=[UNIQUE, EVALUATIONS],
        help='Count every distinct genome once ("unique") or every '
             'evaluation ("evaluations"). Defaults to "unique"')


def create_parser():
    parser = argparse.ArgumentParser(
        description=(
            'pulsevo. Genetic optimization of quantum memory write pulses '
            'against a simulated or analytic fitness backend'))
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    optimize = subparsers.add_parser(
        'optimize', help='Run a single optimization')
    add_config_arguments(optimize)
    add_logging_arguments(optimize)

    sweep_width = subparsers.add_parser(
        'sweep-width', help='Optimize every encoding for every signal width')
    add_config_arguments(sweep_width)
    add_logging_arguments(sweep_width)
    sweep_width.add_argument(
        '--widths', '-w', dest='widths', type=float, nargs='+',
        help='The signal FWHMs to scan, in ns')

    sweep_energy = subparsers.add_parser(
        'sweep-energy',
        help='Re-optimize a reference run under shrinking area budgets')
    add_config_arguments(sweep_energy)
    add_logging_arguments(sweep_energy)
    sweep_energy.add_argument(
        '--reference-dir', '-r', dest='reference_dir', type=str,
        help='The output directory of the unconstrained reference run of '
             'a single encoding')
    sweep_energy.add_argument(
        '--reference-run', dest='reference_dirs', type=str, action='append',
        help='Add the reference run of one encoding, in the format '
        '"encoding:run_directory". Every encoding in the config is then '
        'swept.')
    sweep_energy.add_argument(
        '--alphas', '-a', dest='alphas', type=float, nargs='+',
        help='The fractions of the reference pulse area to allow')

    analyze = subparsers.add_parser(
        'analyze', help='Recompute the reports of a finished run')
    add_analysis_arguments(analyze)
    add_logging_arguments(analyze)
    analyze.add_argument(
        '--fraction', dest='fraction', type=float, default=0.9,
        help='The fraction of the best fitness a solution needs to enter '
             'the variance report. Defaults to 0.9')

    emit_plots = subparsers.add_parser(
        'emit-plots', help='Write the CSV data behind every plot')
    add_analysis_arguments(emit_plots)
    add_logging_arguments(emit_plots)

    return parser


def parse_arguments(args):
    '''Parse the command line arguments. Returns the parsed options and,
    for commands that run optimizations, the merged config dict.'''
    parser = create_parser()
    options = vars(parser.parse_args(args))
    if options['command'] in COMMANDS:
        return options, config_from_args(options)
    return options, None


def logging_setup(filename, sentry_dsn):
    '''Sets up the logging system to output to stdout and filename,
    if filename is not None'''

    LOGGING_FORMAT = '%(asctime)s [%(name)s] %(levelname)s: %(message)s'

    if not os.environ.get('PULSEVO_DISABLE_LOGGING'):
        # Set up stdout logger
        logging.basicConfig(
            level=logging.INFO, format=LOGGING_FORMAT, stream=sys.stdout)

    # Set up file logger
    if filename:
        handler = logging.handlers.RotatingFileHandler(
            filename, maxBytes=1024 * 1024, backupCount=5)
        handler.setFormatter(logging.Formatter(LOGGING_FORMAT))
        logging.getLogger().addHandler(handler)
        logging.getLogger().setLevel(logging.INFO)


def sentry_setup(sentry_dsn):
    '''Returns a client that reports exceptions to the provided DSN, or
    `None` if no DSN is given'''
    if sentry_dsn:
        return Client(dsn=sentry_dsn)
    return None


def run_command(options, data):
    command = options['command']
    if command == 'analyze':
        return runner.cmd_analyze(
            options['directory'], options['bins'], options['weighting'],
            options['fraction'])
    if command == 'emit-plots':
        return runner.cmd_emit_plots(
            options['directory'], options['bins'], options['weighting'])
    result = COMMANDS[command](data)
    if command == 'optimize':
        report_best(result.best())
    return result


def report_best(best, stream=None):
    '''Writes the best fitness and genome of a finished run.'''
    stream = stream if stream is not None else sys.stdout
    stream.write('best fitness %s genome %s\n' % (
        format_float(best['fitness']),
        ' '.join(format_float(g) for g in best['genome'])))


def main(args=None):
    if args is None:
        args = sys.argv[1:]
    options = vars(create_parser().parse_args(args))
    logging_setup(options.get('logfile'), options.get('sentry_dsn'))
    sentry = sentry_setup(options.get('sentry_dsn'))
    try:
        data = None
        if options['command'] in COMMANDS:
            data = config_from_args(options)
            if data.get('logfile') and not options.get('logfile'):
                logging_setup(data['logfile'], data.get('sentry_dsn'))
            if sentry is None:
                sentry = sentry_setup(data.get('sentry_dsn'))
        run_command(options, data)
    except (PulsevoError, ConfigError) as e:
        code = getattr(e, 'code', EXIT_CONFIG_ERROR)
        log.error('%s: %s', getattr(e, 'description', 'invalid config'), e)
        if sentry is not None and code == EXIT_BACKEND_ERROR:
            sentry.captureException()
        return code
    except Exception:
        log.exception('Unexpected error')
        if sentry is not None:
            sentry.captureException()
        return EXIT_BACKEND_ERROR
    return EXIT_OK


def config_from_args(args):
    args = omit_nones(args)
    config = load_config(args.pop('config_filename', None))
    parse_backends(args)
    parse_reference_runs(args)
    parse_ga(config, args)
    args.pop('command', None)

    combined = deep_conjoin(config, args)
    validate_config(combined)
    return combined


def parse_ga(config, args):
    ga = conjoin({}, config.get('ga') or {})

    overrides(ga, args, {
        'generations': 'generations',
        'rng_seed': 'seed',
    })
    args.pop('generations', None)

    if ga:
        args['ga'] = ga


def parse_backends(args):
    backends = {}
    for backend in args.get('backends', []):
        key, value = backend.split(':')
        backends[key] = value

    if len(backends) > 0:
        args['backends'] = backends


def parse_reference_runs(args):
    references = {}
    for reference in args.get('reference_dirs', []):
        encoding, directory = reference.split(':', 1)
        references[encoding] = directory

    if len(references) > 0:
        args['reference_dirs'] = references


def load_config(filename):
    if filename is None:
        return {}
    with open(filename) as f:
        config = yaml.safe_load(f)
    return config or {}


if __name__ == '__main__':
    sys.exit(main())
