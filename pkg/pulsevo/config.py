from copy import deepcopy

from confmodel import Config
from confmodel.config import ConfigField
from confmodel.fields import (
    ConfigBool, ConfigDict, ConfigFloat, ConfigInt, ConfigList, ConfigText)

from pulsevo import memory_sim
from pulsevo.pulse_codec import (
    DEFAULT_DT, DEFAULT_WINDOW, FREEFORM, GAUSSIAN, GENE_COUNTS, Codec,
    TimeWindow)
from pulsevo.utils import deep_conjoin, omit, omit_nones

DEFAULT_GENERATIONS = {GAUSSIAN: 25, FREEFORM: 50}
DEFAULT_WIDTHS = [3.8, 8.9, 18.0, 31.0, 41.0, 43.0]
DEFAULT_ALPHAS = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


class GAConfig(Config):
    genes = ConfigInt(
        "Number of genes per genome, 16 for free-form and 3 for gaussian "
        "pulses",
        default=GENE_COUNTS[FREEFORM])

    generations = ConfigInt(
        "Number of evaluated populations, counting the initial one",
        default=DEFAULT_GENERATIONS[FREEFORM])

    population_size = ConfigInt(
        "Number of individuals in every generation",
        default=60)

    parents_mating = ConfigInt(
        "Number of parents chosen by tournament for each generation",
        default=10)

    tournament_size = ConfigInt(
        "Number of individuals competing in each tournament",
        default=10)

    elitism_size = ConfigInt(
        "Number of best individuals copied unchanged into the next "
        "generation",
        default=5)

    children_per_generation = ConfigInt(
        "Number of children bred per generation. Defaults to "
        "`population_size - elitism_size`, and must equal it if given.",
        default=None)

    mutation_probability = ConfigFloat(
        "Probability that a gene of a child is replaced by a random value",
        default=0.3)

    rng_seed = ConfigInt(
        "Root seed of the random streams",
        default=0)

    early_stop_generations = ConfigInt(
        "Stop after this many generations without improvement. 0 disables "
        "early stopping.",
        default=0)

    @property
    def children(self):
        return self.population_size - self.elitism_size

    def post_validate(self):
        if self.elitism_size > self.population_size:
            self.raise_config_error(
                "elitism_size must not exceed population_size")
        if (self.children_per_generation is not None and
                self.children_per_generation != self.children):
            self.raise_config_error(
                "population_size must equal elitism_size + "
                "children_per_generation")
        if self.parents_mating < 2:
            self.raise_config_error("parents_mating must be at least 2")
        if not 1 <= self.tournament_size <= self.population_size:
            self.raise_config_error(
                "tournament_size must lie in [1, population_size]")
        if not 0 <= self.mutation_probability <= 1:
            self.raise_config_error(
                "mutation_probability must lie in [0, 1]")
        if self.generations < 1:
            self.raise_config_error("generations must be at least 1")
        if self.early_stop_generations < 0:
            self.raise_config_error(
                "early_stop_generations must be non-negative")


class SimConfig(Config):
    optical_depth = ConfigFloat(
        "Optical depth of the ensemble", default=10.0)
    gamma = ConfigFloat(
        "Excited state decay rate in rad/ns",
        default=memory_sim.DEFAULT_GAMMA)
    gamma_s = ConfigFloat(
        "Spin wave amplitude decay rate in 1/ns",
        default=memory_sim.DEFAULT_GAMMA_S)
    detuning = ConfigFloat(
        "One-photon detuning in rad/ns",
        default=memory_sim.DEFAULT_DETUNING)
    omega_max = ConfigFloat(
        "Control Rabi frequency in rad/ns at full drive",
        default=memory_sim.DEFAULT_OMEGA_MAX)
    n_z = ConfigInt(
        "Number of slices the medium is split into", default=64)
    dt_int = ConfigFloat(
        "Integrator step in ns", default=0.05)
    trace_dt = ConfigFloat(
        "Sample period of the recorded traces in ns. Must be a multiple of "
        "`dt_int`.", default=0.25)


class TimingConfig(Config):
    storage_time = ConfigFloat(
        "Time between the signal and the read pulse centers in ns",
        default=200.0)
    read_fwhm = ConfigFloat(
        "FWHM of the gaussian read pulse in ns", default=40.0)
    signal_center = ConfigFloat(
        "Center of the signal pulse in ns", default=0.0)
    trace_span = ConfigFloat(
        "Minimum length of the simulated trace in ns, or `None` for the "
        "shortest trace covering both efficiency windows",
        default=None)


class SignalConfig(Config):
    fwhm = ConfigFloat(
        "Intensity FWHM of the signal pulse in ns", default=18.0)
    amplitude = ConfigFloat(
        "Peak field amplitude of the signal pulse", default=1.0)


class InstrumentConfig(Config):
    aom_rise_time = ConfigFloat(
        "10%-90% rise time of the modulator in ns. 0 disables filtering.",
        default=15.0)


class CodecConfig(Config):
    window_start = ConfigFloat(
        "Start of the decode window in ns, relative to the signal center",
        default=DEFAULT_WINDOW[0])
    window_end = ConfigFloat(
        "End of the decode window in ns, relative to the signal center",
        default=DEFAULT_WINDOW[1])
    dt_sample = ConfigFloat(
        "Sample period of decoded waveforms in ns", default=DEFAULT_DT)
    smoothing = ConfigFloat(
        "Smoothing weight of the free-form spline. 0 gives the natural "
        "interpolating spline.", default=0.0)

    def post_validate(self):
        if not self.window_start < self.window_end:
            self.raise_config_error(
                "window_start must be smaller than window_end")


class FitnessConfig(Config):
    tap_fraction = ConfigFloat(
        "Fraction of the input signal picked off to normalize the fitness",
        default=1.0)


class ToyConfig(Config):
    kind = ConfigText(
        "One of `quadratic`, `amplitude`, `constant` or `area`",
        default='quadratic')
    gaussian_target = ConfigList(
        "The optimal (a, f, d) of the quadratic objective, or `None` for "
        "the default target", default=None)
    freeform_target = ConfigList(
        "The optimal 16 control points of the quadratic objective, or "
        "`None` for the default target", default=None)
    value = ConfigFloat(
        "Fitness returned by the constant objective", default=1.0)

    def post_validate(self):
        if self.kind not in ('quadratic', 'amplitude', 'constant', 'area'):
            self.raise_config_error(
                "kind must be one of quadratic, amplitude, constant or area")


SECTIONS = {
    'ga': GAConfig,
    'sim': SimConfig,
    'timing': TimingConfig,
    'signal': SignalConfig,
    'instrument': InstrumentConfig,
    'codec': CodecConfig,
    'fitness': FitnessConfig,
    'toy': ToyConfig,
}


class RunConfig(Config):
    encoding = ConfigText(
        "Genome encoding, `gaussian` or `freeform`", default=FREEFORM)

    encodings = ConfigList(
        "Encodings optimized by the sweep commands, in order",
        default=[GAUSSIAN, FREEFORM])

    backend = ConfigText(
        "The fitness backend type", default='sim')

    backends = ConfigDict(
        "Mapping between backend types and python classes.",
        default={})

    replace_backends = ConfigBool(
        "If `True`, replaces the default backends with `backends`. If "
        "`False`, `backends` is added to the default backends.",
        default=False)

    ga = ConfigDict("Genetic algorithm settings", default={})
    sim = ConfigDict("Simulator settings", default={})
    timing = ConfigDict("Storage experiment timing", default={})
    signal = ConfigDict("Signal pulse", default={})
    instrument = ConfigDict("Instrument model", default={})
    codec = ConfigDict("Genome decoding", default={})
    fitness = ConfigDict("Fitness normalization", default={})
    toy = ConfigDict("Analytic toy backend settings", default={})

    widths = ConfigList(
        "Signal FWHMs in ns scanned by `sweep-width`",
        default=DEFAULT_WIDTHS)

    alphas = ConfigList(
        "Energy budget fractions scanned by `sweep-energy`",
        default=DEFAULT_ALPHAS)

    reference_dir = ConfigText(
        "Run directory of a single unconstrained reference run. "
        "`sweep-energy` then only sweeps the encoding of that run.",
        default=None)

    reference_dirs = ConfigDict(
        "Mapping from encoding to the run directory of its unconstrained "
        "reference run. If given, `sweep-energy` sweeps every encoding in "
        "`encodings` and each needs a reference run.",
        default={})

    output_dir = ConfigText(
        "Directory run artifacts are written to", default='runs')

    seed = ConfigInt(
        "Root random seed", default=0)

    logfile = ConfigText(
        "File to log to or `None` for no logging",
        default=None)

    sentry_dsn = ConfigText(
        "DSN to send exceptions",
        default=None)

    def post_validate(self):
        if self.encoding not in GENE_COUNTS:
            self.raise_config_error(
                "encoding must be one of %s" % ', '.join(sorted(GENE_COUNTS)))
        for name in SECTIONS:
            # constructing the section runs its own validation
            self.section(name)
        if self.section('ga').genes != GENE_COUNTS[self.encoding]:
            self.raise_config_error(
                "ga.genes must be %d for %s genomes" % (
                    GENE_COUNTS[self.encoding], self.encoding))

    def section(self, name):
        '''The nested section ``name`` as its config object, with the
        encoding dependent GA defaults filled in.'''
        data = omit_nones(getattr(self, name))
        if name == 'ga':
            data = deep_conjoin(ga_defaults(self.encoding, self.seed), data)
        return SECTIONS[name](data)


def run_config(data):
    '''Builds a :class:`RunConfig`, treating `None` values as unset.'''
    return RunConfig(omit_nones(data))


def ga_defaults(encoding, seed=0):
    return {
        'genes': GENE_COUNTS[encoding],
        'generations': DEFAULT_GENERATIONS[encoding],
        'rng_seed': seed,
    }


def field_values(config):
    '''Every field of ``config`` with its (possibly default) value.'''
    return dict(
        (name, deepcopy(getattr(config, name)))
        for name, field in vars(type(config)).items()
        if isinstance(field, ConfigField))


def resolve(data):
    '''
    Returns the fully defaulted form of the raw config dict ``data``:
    every field present, every nested section expanded. Building a
    :class:`RunConfig` from the result gives the same run.
    '''
    config = run_config(data)
    resolved = field_values(config)
    for name in SECTIONS:
        resolved[name] = field_values(config.section(name))
    return resolved


def with_overrides(data, **changes):
    '''
    The resolved form of the raw config ``data`` with ``changes`` merged
    in, nested sections key by key. A gene count set in ``data`` is dropped
    when ``changes`` switches the encoding.
    '''
    data = dict(data)
    if 'encoding' in changes and 'ga' in data:
        data['ga'] = omit(data['ga'], 'genes')
    return resolve(deep_conjoin(data, changes))


def sim_params(config):
    # omega_max belongs to the instrument model
    return memory_sim.SimParams(
        **omit(field_values(config.section('sim')), 'omega_max'))


def experiment_timing(config):
    return memory_sim.ExperimentTiming(
        **field_values(config.section('timing')))


def signal_spec(config):
    return memory_sim.SignalSpec(**field_values(config.section('signal')))


def instrument_model(config):
    instrument = config.section('instrument')
    return memory_sim.InstrumentModel(
        aom_rise_time=instrument.aom_rise_time,
        omega_max=config.section('sim').omega_max)


def codec(config):
    section = config.section('codec')
    return Codec(
        TimeWindow(section.window_start, section.window_end),
        section.dt_sample, section.smoothing)


def simulation_context(config):
    return memory_sim.SimulationContext(
        codec=codec(config),
        signal=signal_spec(config),
        timing=experiment_timing(config),
        params=sim_params(config),
        instrument=instrument_model(config),
        tap_fraction=config.section('fitness').tap_fraction)
