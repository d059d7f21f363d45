'''
Storage and retrieval of a signal pulse in a three-level Lambda ensemble.

The ensemble is modelled in the co-moving frame with the field ``E(z, t)``,
the optical polarization ``P(z, t)`` and the spin wave ``S(z, t)``::

    dE/dz = i sqrt(d0) P
    dP/dt = -(gamma + i Delta) P + i sqrt(d0) gamma E + i Omega(t) S
    dS/dt = -gamma_s S + i Omega(t) P

on z in [0, 1]. The medium is split into ``n_z`` slices: the field lives on
slice interfaces and the atomic variables at slice centers, so the
semi-discrete scheme keeps the photon/excitation balance exactly. Time
stepping is classical RK4 with the field recomputed from P at every stage.

An experiment has a write phase (signal + write control), a dark storage
interval that is applied analytically, and a read phase driven by a fixed
Gaussian read pulse centered at the storage time. All times are in ns and
rates in rad/ns.
'''
from dataclasses import dataclass, field
import logging
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import lfilter

from pulsevo.error import (
    IntegratorInstability, InvalidParameters, PulsevoError)
from pulsevo.pulse_codec import (
    GaussianGenome, TimeWindow, Waveform, decode_gaussian)
from pulsevo import fitness_lab

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
TWO_LN2 = 2 * np.log(2)

DEFAULT_GAMMA = TWO_PI * 0.5
DEFAULT_DETUNING = TWO_PI * 1.0
# retrieved energy falls by 1/1.3 over the default 200 ns storage time
DEFAULT_GAMMA_S = float(np.log(1.3) / (2 * 200.0))
DEFAULT_OMEGA_MAX = 1.2

RK4_STABILITY_LIMIT = 2.5
READ_SPAN_FWHMS = 3.0


@dataclass(frozen=True)
class SimParams(object):
    optical_depth: float = 10.0
    gamma: float = DEFAULT_GAMMA
    gamma_s: float = DEFAULT_GAMMA_S
    detuning: float = DEFAULT_DETUNING
    n_z: int = 64
    dt_int: float = 0.05
    trace_dt: float = 0.25

    def __post_init__(self):
        if not self.optical_depth > 0:
            raise InvalidParameters('optical_depth must be positive')
        if self.gamma < 0 or self.gamma_s < 0:
            raise InvalidParameters('rates must be non-negative')
        if self.n_z < 2:
            raise InvalidParameters('n_z must be at least 2')
        if not self.dt_int > 0 or not self.trace_dt > 0:
            raise InvalidParameters('dt_int and trace_dt must be positive')
        _steps_per(self.trace_dt, self.dt_int, 'trace_dt', 'dt_int')


@dataclass(frozen=True)
class ExperimentTiming(object):
    '''
    :param float storage_time: Time between signal center and read pulse
        center.
    :param float read_fwhm: FWHM of the Gaussian read pulse.
    :param float signal_center: Center of the signal pulse, t0.
    :param trace_span: Minimum simulated length, or ``None`` for the
        smallest span covering both efficiency windows.
    '''
    storage_time: float = 200.0
    read_fwhm: float = 40.0
    signal_center: float = 0.0
    trace_span: Optional[float] = None

    def __post_init__(self):
        if not self.storage_time > 0:
            raise InvalidParameters('storage_time must be positive')
        if not self.read_fwhm > 0:
            raise InvalidParameters('read_fwhm must be positive')
        if self.trace_span is not None and (
                self.trace_span < 2 * self.storage_time):
            raise InvalidParameters(
                'trace_span must cover [-dt/2, 3dt/2] around the signal')

    @property
    def input_window(self):
        half = self.storage_time / 2
        return (self.signal_center - half, self.signal_center + half)

    @property
    def output_window(self):
        half = self.storage_time / 2
        center = self.signal_center + self.storage_time
        return (center - half, center + half)

    @property
    def read_center(self):
        return self.signal_center + self.storage_time


@dataclass(frozen=True)
class SignalSpec(object):
    fwhm: float = 18.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.fwhm > 0:
            raise InvalidParameters('signal fwhm must be positive')


@dataclass(frozen=True)
class InstrumentModel(object):
    '''First-order low-pass standing in for the AOM, followed by the map
    from drive amplitude (optical power) to Rabi frequency.'''
    aom_rise_time: float = 15.0
    omega_max: float = DEFAULT_OMEGA_MAX

    def __post_init__(self):
        if self.aom_rise_time < 0:
            raise InvalidParameters('aom_rise_time must be non-negative')
        if self.omega_max < 0:
            raise InvalidParameters('omega_max must be non-negative')

    @property
    def time_constant(self):
        # 10%-90% rise time of a first-order filter is tau * ln(9)
        return self.aom_rise_time / np.log(9)


@dataclass(frozen=True, eq=False)
class RabiEnvelope(object):
    t_start: float
    dt_sample: float
    omega: np.ndarray

    @property
    def times(self):
        return self.t_start + self.dt_sample * np.arange(self.omega.size)


@dataclass(frozen=True, eq=False)
class MemoryTrace(object):
    time: np.ndarray
    input_intensity: np.ndarray
    output_intensity: np.ndarray
    spin_wave_norm: float
    stored_spin_wave_norm: float = 0.0

    @property
    def dt(self):
        return float(self.time[1] - self.time[0])


@dataclass(frozen=True)
class SimulationContext(object):
    '''Everything besides the genome that one experiment needs.'''
    codec: object
    signal: SignalSpec = field(default_factory=SignalSpec)
    timing: ExperimentTiming = field(default_factory=ExperimentTiming)
    params: SimParams = field(default_factory=SimParams)
    instrument: InstrumentModel = field(default_factory=InstrumentModel)
    tap_fraction: float = 1.0


@dataclass(frozen=True, eq=False)
class BatchResult(object):
    genome: tuple
    trace: Optional[MemoryTrace] = None
    efficiency: Optional[object] = None
    fitness: Optional[float] = None
    error: Optional[PulsevoError] = None

    @property
    def ok(self):
        return self.error is None


def _steps_per(long_dt, short_dt, long_name, short_name):
    ratio = long_dt / short_dt
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
        raise InvalidParameters(
            '%s=%r must be an integer multiple of %s=%r' % (
                long_name, long_dt, short_name, short_dt))
    return steps


def make_signal(spec, timing):
    '''
    Returns the Gaussian field envelope of the signal as a function of time.
    The intensity (not the field) has the FWHM ``spec.fwhm``.
    '''
    def envelope(t):
        t = np.asarray(t, dtype=float)
        return spec.amplitude * np.exp(
            -TWO_LN2 * (t - timing.signal_center) ** 2 / spec.fwhm ** 2)
    return envelope


def apply_instrument(waveform, model):
    '''Low-pass filters the drive and maps it to a Rabi frequency envelope
    ``omega_max * sqrt(filtered)``.'''
    samples = np.asarray(waveform.samples, dtype=float)
    if model.aom_rise_time > 0:
        decay = np.exp(-waveform.dt_sample / model.time_constant)
        samples = lfilter([1 - decay], [1, -decay], samples)
    omega = model.omega_max * np.sqrt(np.clip(samples, 0.0, None))
    return RabiEnvelope(waveform.t_start, waveform.dt_sample, omega)


def filtered_drive_area(waveform, model):
    '''Area under the filtered drive, a proxy for the optical pulse energy
    delivered by the instrument.'''
    omega = apply_instrument(waveform, model).omega
    if model.omega_max == 0:
        return 0.0
    power = (omega / model.omega_max) ** 2
    return float(trapezoid(power, dx=waveform.dt_sample))


def pad_waveform(waveform, t_start, count):
    '''Places ``waveform`` on the grid ``t_start + k*dt`` for ``count``
    samples, zero outside its own extent. Both grids must be aligned.'''
    dt = waveform.dt_sample
    offset = int(round((waveform.t_start - t_start) / dt))
    samples = np.zeros(count)
    src = np.asarray(waveform.samples)
    lo, hi = max(offset, 0), min(offset + src.size, count)
    if hi > lo:
        samples[lo:hi] = src[lo - offset:hi - offset]
    return Waveform(t_start, dt, samples)


def stability_number(params, omega_peak):
    '''``dt_int * (|gamma + i Delta| + d0 gamma + Omega_peak)``, which must
    stay below :data:`RK4_STABILITY_LIMIT`.'''
    rate = (np.hypot(params.gamma, params.detuning) +
            params.optical_depth * params.gamma + omega_peak)
    return params.dt_int * rate


def check_stability(params, omega_peak):
    number = stability_number(params, omega_peak)
    if number > RK4_STABILITY_LIMIT:
        raise IntegratorInstability(
            'dt_int * (|gamma + i*detuning| + optical_depth*gamma + '
            'omega_peak) = %.3g exceeds the RK4 stability bound %.3g; '
            'reduce dt_int below %.3g ns' % (
                number, RK4_STABILITY_LIMIT,
                params.dt_int * RK4_STABILITY_LIMIT / number))


class _Medium(object):
    '''The right hand side of the discretized equations.'''

    def __init__(self, params):
        self.params = params
        self.dz = 1.0 / params.n_z
        self.field_gain = 1j * np.sqrt(params.optical_depth) * self.dz
        self.p_decay = -(params.gamma + 1j * params.detuning)
        self.p_drive = 1j * np.sqrt(params.optical_depth) * params.gamma
        self.s_decay = -params.gamma_s

    def output(self, P, e_in):
        return e_in + self.field_gain * P.sum(axis=-1)

    def rhs(self, P, S, e_in, omega):
        cum = np.cumsum(P, axis=-1)
        # field at slice centers: upstream interfaces plus half the slice
        e_mid = e_in + self.field_gain * (cum - 0.5 * P)
        drive = 1j * omega[:, None]
        dP = self.p_decay * P + self.p_drive * e_mid + drive * S
        dS = self.s_decay * S + drive * P
        return dP, dS


def _interpolate(omega, steps_per_sample, n_half):
    '''Linear interpolation of ``omega`` (batch, samples) at every half
    integrator step.'''
    half_per_sample = 2 * steps_per_sample
    pos = np.arange(n_half) / half_per_sample
    idx = np.minimum(pos.astype(int), omega.shape[1] - 2)
    frac = pos - idx
    return omega[:, idx] * (1 - frac) + omega[:, idx + 1] * frac


def _integrate_phase(medium, omega, e_in, n_steps, record_every, P, S):
    '''
    Advances ``P`` and ``S`` over ``n_steps`` RK4 steps.

    :param omega: Rabi frequency at every half step, shape (batch, 2n+1).
    :param e_in: Input field at every half step, shape (2n+1,).
    :returns: (output intensity records, P, S); a record is taken every
        ``record_every`` steps starting with the initial state.
    '''
    h = medium.params.dt_int
    records = []
    for n in range(n_steps + 1):
        k = 2 * n
        if n % record_every == 0:
            records.append(np.abs(medium.output(P, e_in[k])) ** 2)
        if n == n_steps:
            break
        om0, om1, om2 = omega[:, k], omega[:, k + 1], omega[:, k + 2]
        e0, e1, e2 = e_in[k], e_in[k + 1], e_in[k + 2]
        k1p, k1s = medium.rhs(P, S, e0, om0)
        k2p, k2s = medium.rhs(P + 0.5 * h * k1p, S + 0.5 * h * k1s, e1, om1)
        k3p, k3s = medium.rhs(P + 0.5 * h * k2p, S + 0.5 * h * k2s, e1, om1)
        k4p, k4s = medium.rhs(P + h * k3p, S + h * k3s, e2, om2)
        P = P + (h / 6) * (k1p + 2 * k2p + 2 * k3p + k4p)
        S = S + (h / 6) * (k1s + 2 * k2s + 2 * k3s + k4s)
    return np.stack(records, axis=1), P, S


def _phase_grid(writes, timing, params):
    '''Aligns the write, storage and read phases to the waveform grid.'''
    first = writes[0]
    dt = first.dt_sample
    for wf in writes:
        if wf.dt_sample != dt or wf.t_start != first.t_start:
            raise InvalidParameters('write waveforms must share one grid')
    _steps_per(dt, params.trace_dt, 'dt_sample', 'trace_dt')
    lo, hi = timing.input_window
    t0 = first.t_start - dt * max(
        0, int(np.ceil((first.t_start - lo) / dt - 1e-9)))

    def index(t):
        return int(np.ceil((t - t0) / dt - 1e-9))

    n_write = index(hi)
    n_read = max(n_write, index(
        timing.read_center - READ_SPAN_FWHMS * timing.read_fwhm))
    end = timing.output_window[1]
    if timing.trace_span is not None:
        end = max(end, lo + timing.trace_span)
    n_end = index(end)
    return t0, dt, n_write, n_read, n_end


def simulate_batch(writes, spec, timing, params, instrument):
    '''
    Runs one storage experiment per write waveform, all in a single
    vectorized integration.

    :returns: list of :class:`MemoryTrace`, in input order.
    :raises IntegratorInstability: if any write (or the read pulse) needs a
        smaller integrator step.
    '''
    if not writes:
        return []
    t0, dt, n_write, n_read, n_end = _phase_grid(writes, timing, params)
    steps = _steps_per(dt, params.dt_int, 'dt_sample', 'dt_int')
    record_every = _steps_per(params.trace_dt, params.dt_int,
                              'trace_dt', 'dt_int')
    per_sample = steps // record_every
    medium = _Medium(params)
    signal = make_signal(spec, timing)
    batch = len(writes)

    write_omega = np.stack([
        apply_instrument(pad_waveform(wf, t0, n_write + 1), instrument).omega
        for wf in writes])
    read_wf = decode_gaussian(
        GaussianGenome(1.0, timing.read_fwhm, timing.read_center),
        TimeWindow(t0 + n_read * dt, t0 + n_end * dt), dt)
    read_omega = apply_instrument(read_wf, instrument).omega
    check_stability(params, float(max(write_omega.max(), read_omega.max())))

    n_steps = n_write * steps
    half_times = t0 + 0.5 * params.dt_int * np.arange(2 * n_steps + 1)
    P = np.zeros((batch, params.n_z), dtype=complex)
    S = np.zeros((batch, params.n_z), dtype=complex)
    write_out, P, S = _integrate_phase(
        medium, _interpolate(write_omega, steps, 2 * n_steps + 1),
        signal(half_times).astype(complex), n_steps, record_every, P, S)
    stored = medium.dz * np.sum(np.abs(S) ** 2, axis=-1)

    # dark storage: the polarization and field have decayed, only the spin
    # wave survives the gap between write and read phases
    gap = (n_read - n_write) * dt
    S = S * np.exp(-params.gamma_s * gap)
    P = np.zeros_like(P)

    n_steps = (n_end - n_read) * steps
    read_out, P, S = _integrate_phase(
        medium,
        _interpolate(np.tile(read_omega, (batch, 1)), steps,
                     2 * n_steps + 1),
        np.zeros(2 * n_steps + 1, dtype=complex),
        n_steps, record_every, P, S)
    final = medium.dz * np.sum(np.abs(S) ** 2, axis=-1)

    time = t0 + params.trace_dt * np.arange(n_end * per_sample + 1)
    output = np.zeros((batch, time.size))
    output[:, :n_write * per_sample] = write_out[:, :n_write * per_sample]
    output[:, n_read * per_sample:] = read_out
    input_intensity = signal(time) ** 2
    input_intensity.setflags(write=False)

    traces = []
    for i in range(batch):
        out = output[i]
        out.setflags(write=False)
        traces.append(MemoryTrace(
            time, input_intensity, out, float(final[i]), float(stored[i])))
    return traces


def simulate_experiment(write, spec, timing, params, instrument):
    '''Runs a single storage experiment and returns its trace.'''
    [trace] = simulate_batch([write], spec, timing, params, instrument)
    return trace


def evaluate_batch(genomes, context):
    '''
    Simulates one experiment per genome and scores it.

    Decoding and stability problems are reported per genome on the
    :class:`BatchResult`; the rest of the batch is still evaluated. Results
    are returned in input order.
    '''
    results = [None] * len(genomes)
    pending = []
    for i, genome in enumerate(genomes):
        try:
            wf = context.codec.decode(genome)
            # the read pulse peaks at omega_max, writes never exceed it
            check_stability(context.params, context.instrument.omega_max)
        except PulsevoError as e:
            log.warning('Genome %r not evaluated: %s', genome, e)
            results[i] = BatchResult(genome, error=e)
            continue
        pending.append((i, wf))

    if pending:
        traces = simulate_batch(
            [wf for _, wf in pending], context.signal, context.timing,
            context.params, context.instrument)
        for (i, _), trace in zip(pending, traces):
            try:
                efficiency = fitness_lab.internal_efficiency(
                    trace, context.timing)
                fitness = fitness_lab.proxy_fitness(
                    trace, context.timing, context.tap_fraction)
            except PulsevoError as e:
                log.warning('Genome %r not scored: %s', genomes[i], e)
                results[i] = BatchResult(genomes[i], trace, error=e)
                continue
            results[i] = BatchResult(
                genomes[i], trace, efficiency, fitness)
    return results


__all__ = [
    'SimParams', 'ExperimentTiming', 'SignalSpec', 'InstrumentModel',
    'MemoryTrace', 'SimulationContext', 'BatchResult', 'make_signal',
    'apply_instrument', 'simulate_experiment', 'simulate_batch',
    'evaluate_batch']
