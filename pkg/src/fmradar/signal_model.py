"""FM broadcast waveform synthesis and target scene rendering.

All functions are pure: every source of randomness is an explicit seed, so
repeated calls with the same arguments produce bit-identical arrays. Echo
delays are applied as exact linear phase in the frequency domain, so
non-integer-sample delays are supported; the delay operator is circular
over the record, which is why records are chosen much longer than the
largest delay of interest.
"""

from dataclasses import dataclass, replace

import numpy as np

from .constants import MAX_COMPOSITE_BANDWIDTH_HZ
from .errors import ParameterError

# Limiter level for the synthetic message, in units of the filtered
# noise's standard deviation, applied before peak normalization. Raises
# the rms-to-peak ratio (as broadcast audio processing does) so the
# modulated carrier occupies a bandwidth near the Carson estimate
# 2*(deviation + audio bandwidth) instead of a small fraction of it.
_MESSAGE_CLIP_SIGMA = 1.0
_MESSAGE_CLIP_ROUNDS = 3


@dataclass(frozen=True)
class EmitterSpec:
    """Parameters of a (possibly multi-channel) FM broadcast emitter.

    Attributes:
        carrier_offset_hz: offset of the (center) FM carrier from
            complex-baseband zero.
        freq_deviation_hz: maximum frequency deviation of each channel.
        channel_count: number of simultaneously broadcast channels.
        channel_spacing_hz: carrier-to-carrier spacing of the channels.
        amplitude: linear amplitude of each channel's carrier.
    """

    carrier_offset_hz: float
    freq_deviation_hz: float
    channel_count: int = 1
    channel_spacing_hz: float = 200e3
    amplitude: float = 1.0

    def __post_init__(self):
        if self.freq_deviation_hz <= 0:
            raise ParameterError("freq_deviation_hz must be positive")
        if self.channel_count < 1:
            raise ParameterError("channel_count must be >= 1")
        if self.channel_spacing_hz <= 0:
            raise ParameterError("channel_spacing_hz must be positive")
        occupied = self.channel_count * self.channel_spacing_hz
        if occupied > MAX_COMPOSITE_BANDWIDTH_HZ:
            raise ParameterError(
                f"composite bandwidth {occupied:.3g} Hz exceeds the "
                f"{MAX_COMPOSITE_BANDWIDTH_HZ:.3g} Hz broadcast band"
            )


@dataclass
class MessageSignal:
    """Band-limited, peak-normalized real message driving an FM channel."""

    samples: np.ndarray
    sample_rate_hz: float
    seed: int


@dataclass
class SampledSignal:
    """Uniformly sampled complex baseband sequence."""

    samples: np.ndarray
    sample_rate_hz: float
    t0_offset_s: float = 0.0

    def __post_init__(self):
        if len(self.samples) < 1:
            raise ParameterError("signal must contain at least one sample")
        if self.sample_rate_hz <= 0:
            raise ParameterError("sample_rate_hz must be positive")

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return self.n / self.sample_rate_hz


@dataclass
class TargetScene:
    """Echo delays/amplitudes plus direct-path amplitude and noise level.

    ``echoes`` is a list of ``(delay_s, amplitude)`` pairs with strictly
    increasing nonnegative delays. ``noise_std`` is the standard deviation
    of the circular complex noise added to the surveillance channel
    (variance split equally between real and imaginary parts).
    """

    echoes: list
    direct_amplitude: float = 1.0
    noise_std: float = 0.0

    def __post_init__(self):
        delays = [d for d, _ in self.echoes]
        if any(d < 0 for d in delays):
            raise ParameterError("echo delays must be nonnegative")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ParameterError("echo delays must be strictly increasing")
        if any(a <= 0 for _, a in self.echoes):
            raise ParameterError("echo amplitudes must be positive")
        if self.noise_std < 0:
            raise ParameterError("noise_std must be nonnegative")


def _brickwall_lowpass(x: np.ndarray, cutoff_hz: float, sample_rate_hz: float) -> np.ndarray:
    spec = np.fft.rfft(x)
    freqs = np.fft.rfftfreq(len(x), d=1.0 / sample_rate_hz)
    spec[freqs > cutoff_hz] = 0.0
    return np.fft.irfft(spec, n=len(x))


def synthesize_message(
    seed: int, n_samples: int, audio_bw_hz: float, sample_rate_hz: float
) -> MessageSignal:
    """Generate a pseudorandom band-limited message, peak-normalized to 1.

    White Gaussian noise is brick-wall low-pass filtered to ``audio_bw_hz``,
    soft-limited, re-filtered to restore the band limit, and scaled so
    ``max(abs(samples)) == 1``. Deterministic for a fixed seed.

    Args:
        seed: RNG seed.
        n_samples: number of samples to generate (>= 16).
        audio_bw_hz: one-sided message bandwidth, below Nyquist.
        sample_rate_hz: sample rate of the message.

    Returns:
        MessageSignal with real samples in [-1, 1].

    Raises:
        ParameterError: if the bandwidth or length is out of range.
    """
    if n_samples < 16:
        raise ParameterError("n_samples must be at least 16")
    if not 0 < audio_bw_hz < sample_rate_hz / 2:
        raise ParameterError(
            f"audio_bw_hz must lie in (0, {sample_rate_hz / 2:.6g}); got {audio_bw_hz:.6g}"
        )

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n_samples)
    x = _brickwall_lowpass(x, audio_bw_hz, sample_rate_hz)
    sigma = float(np.std(x))
    lim = _MESSAGE_CLIP_SIGMA * sigma
    # Several clip/refilter rounds: the low-pass regrows clipped peaks, so
    # one round leaves the rms-to-peak ratio well short of the limiter
    # target.
    for _ in range(_MESSAGE_CLIP_ROUNDS):
        if lim > 0:
            x = np.clip(x, -lim, lim)
        x = _brickwall_lowpass(x, audio_bw_hz, sample_rate_hz)
    peak = float(np.max(np.abs(x)))
    if peak == 0.0:
        raise ParameterError("degenerate all-zero message")
    x = x / peak
    return MessageSignal(samples=x, sample_rate_hz=sample_rate_hz, seed=seed)


def _phase_integral(msg_samples: np.ndarray, sample_rate_hz: float) -> np.ndarray:
    # Running trapezoidal integral of the message at step 1/fs; I[0] = 0.
    steps = 0.5 * (msg_samples[1:] + msg_samples[:-1]) / sample_rate_hz
    out = np.empty(len(msg_samples))
    out[0] = 0.0
    np.cumsum(steps, out=out[1:])
    return out


def fm_modulate(msg: MessageSignal, spec: EmitterSpec, n_samples: int) -> SampledSignal:
    """Frequency-modulate a single-channel carrier with ``msg``.

    The output is ``A * exp(j*2*pi*(f_c*n/fs + f_dev*I[n]))`` where ``I`` is
    the running trapezoidal integral of the message. The envelope is
    constant and equal to ``spec.amplitude``.
    """
    if spec.channel_count != 1:
        raise ParameterError("fm_modulate handles a single channel; use compose_multichannel")
    if len(msg.samples) < n_samples:
        raise ParameterError(
            f"message has {len(msg.samples)} samples; {n_samples} required"
        )
    fs = msg.sample_rate_hz
    x = np.asarray(msg.samples[:n_samples], dtype=float)
    integ = _phase_integral(x, fs)
    t_idx = np.arange(n_samples)
    phase = 2.0 * np.pi * (spec.carrier_offset_hz * t_idx / fs + spec.freq_deviation_hz * integ)
    samples = spec.amplitude * np.exp(1j * phase)
    return SampledSignal(samples=samples, sample_rate_hz=fs)


def compose_multichannel(messages: list, spec: EmitterSpec) -> SampledSignal:
    """Sum ``spec.channel_count`` independently modulated FM carriers.

    Carrier offsets are ``spec.carrier_offset_hz + k*spacing`` with ``k``
    centered on zero (k = -(C-1)/2 .. (C-1)/2; half-integers for even C).
    All channels use equal amplitudes.
    """
    if len(messages) != spec.channel_count:
        raise ParameterError(
            f"{spec.channel_count} channels need {spec.channel_count} messages; "
            f"got {len(messages)}"
        )
    n = len(messages[0].samples)
    fs = messages[0].sample_rate_hz
    for m in messages[1:]:
        if len(m.samples) != n or m.sample_rate_hz != fs:
            raise ParameterError("all messages must share length and sample rate")

    count = spec.channel_count
    offsets = spec.carrier_offset_hz + (np.arange(count) - (count - 1) / 2.0) * spec.channel_spacing_hz
    # Leave headroom below Nyquist for deviation; audio sidebands add little.
    if np.max(np.abs(offsets)) + spec.freq_deviation_hz >= fs / 2:
        raise ParameterError("composite channels exceed the Nyquist band")

    total = np.zeros(n, dtype=complex)
    for msg, off in zip(messages, offsets):
        single = replace(spec, carrier_offset_hz=float(off), channel_count=1)
        total += fm_modulate(msg, single, n).samples
    return SampledSignal(samples=total, sample_rate_hz=fs)


def render_scene(
    direct: SampledSignal, scene: TargetScene, seed: int
) -> tuple[SampledSignal, SampledSignal]:
    """Render the surveillance channel for a target scene.

    Each echo is a delayed, scaled copy of ``direct``; the delay is applied
    as exact linear phase in the frequency domain (circular over the
    record). Circular complex Gaussian noise of variance ``noise_std**2``
    is added to the surveillance channel only; the returned direct channel
    is a clean reference scaled by ``scene.direct_amplitude``.

    Returns:
        ``(direct_out, surveillance)`` as SampledSignals.
    """
    duration = direct.duration_s
    for delay, _ in scene.echoes:
        if delay >= duration:
            raise ParameterError(
                f"echo delay {delay:.6g} s exceeds the {duration:.6g} s record"
            )

    n = direct.n
    fs = direct.sample_rate_hz
    spec = np.fft.fft(direct.samples)
    freqs = np.fft.fftfreq(n, d=1.0 / fs)
    transfer = np.zeros(n, dtype=complex)
    for delay, amp in scene.echoes:
        transfer += amp * np.exp(-2j * np.pi * freqs * delay)
    surveillance = np.fft.ifft(spec * transfer)

    if scene.noise_std > 0:
        rng = np.random.default_rng(seed)
        scale = scene.noise_std / np.sqrt(2.0)
        surveillance = surveillance + scale * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )

    direct_out = SampledSignal(
        samples=scene.direct_amplitude * direct.samples,
        sample_rate_hz=fs,
        t0_offset_s=direct.t0_offset_s,
    )
    surv_out = SampledSignal(
        samples=surveillance, sample_rate_hz=fs, t0_offset_s=direct.t0_offset_s
    )
    return direct_out, surv_out
