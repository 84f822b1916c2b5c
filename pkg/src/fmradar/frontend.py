"""Shared receiver chain: down-conversion, spectra, division, band-pass.

DFT convention: forward transforms are plain unnormalized sums and the
inverse carries the 1/N factor (numpy's default). Bin ``k`` of an N-point
spectrum sits at frequency ``k*fs/N`` for ``k < N/2`` and ``(k-N)*fs/N``
above, i.e. numpy ``fftfreq`` order.
"""

from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_EPS_REL
from .errors import ParameterError
from .signal_model import SampledSignal

# Minimum number of usable bins for any downstream estimator.
MIN_VALID_BINS = 8


@dataclass
class Spectrum:
    """Frequency-domain view of a sampled signal (fftfreq bin order)."""

    bins: np.ndarray
    bin_spacing_hz: float
    center_hz: float = 0.0

    @property
    def n(self) -> int:
        return len(self.bins)

    @property
    def sample_rate_hz(self) -> float:
        return self.n * self.bin_spacing_hz


@dataclass
class SpectrumQuotient:
    """Surveillance/reference spectrum ratio with a validity mask.

    Bins outside the passband are exactly zero and flagged invalid in
    ``valid_mask``.
    """

    bins: np.ndarray
    bin_spacing_hz: float
    passband: tuple
    valid_mask: np.ndarray

    @property
    def n(self) -> int:
        return len(self.bins)

    @property
    def sample_rate_hz(self) -> float:
        return self.n * self.bin_spacing_hz


def bin_frequencies(n: int, bin_spacing_hz: float) -> np.ndarray:
    """Frequency of each DFT bin in fftfreq order."""
    return np.fft.fftfreq(n, d=1.0 / (n * bin_spacing_hz))


def ddc(sig: SampledSignal, f_shift_hz: float) -> SampledSignal:
    """Digitally down-convert: multiply by ``exp(-j*2*pi*f_shift*n/fs)``.

    Energy is preserved exactly; ``ddc(sig, -f)`` inverts ``ddc(sig, f)``.
    """
    fs = sig.sample_rate_hz
    if abs(f_shift_hz) >= fs / 2:
        raise ParameterError(f"|f_shift_hz| must be below Nyquist {fs / 2:.6g} Hz")
    rotation = np.exp(-2j * np.pi * f_shift_hz * np.arange(sig.n) / fs)
    return SampledSignal(
        samples=sig.samples * rotation,
        sample_rate_hz=fs,
        t0_offset_s=sig.t0_offset_s,
    )


def spectrum(sig: SampledSignal, center_hz: float = 0.0) -> Spectrum:
    """Forward DFT of a signal (unnormalized convention)."""
    if sig.n < 2:
        raise ParameterError("spectrum needs at least 2 samples")
    return Spectrum(
        bins=np.fft.fft(sig.samples),
        bin_spacing_hz=sig.sample_rate_hz / sig.n,
        center_hz=center_hz,
    )


def inverse_spectrum(spec: Spectrum, t0_offset_s: float = 0.0) -> SampledSignal:
    """Inverse DFT (1/N convention); round-trips ``spectrum`` exactly."""
    return SampledSignal(
        samples=np.fft.ifft(spec.bins),
        sample_rate_hz=spec.sample_rate_hz,
        t0_offset_s=t0_offset_s,
    )


def quotient(surv: Spectrum, ref: Spectrum, eps_rel: float = DEFAULT_EPS_REL) -> SpectrumQuotient:
    """Regularized bin-wise division of surveillance by reference spectra.

    Computes ``surv*conj(ref) / (|ref|^2 + eps)`` with
    ``eps = eps_rel * max|ref|^2``. With ``eps_rel = 0`` this reduces to
    exact complex division wherever the reference bin is nonzero (zero
    bins yield zero instead of dividing by zero). The passband starts as
    the full band with an all-true mask.

    Args:
        surv: surveillance-channel spectrum.
        ref: reference (direct-path) spectrum.
        eps_rel: regularization relative to the strongest reference bin.

    Raises:
        ParameterError: if the spectra have different shapes or spacing.
    """
    if surv.n != ref.n:
        raise ParameterError(f"spectrum sizes differ: {surv.n} vs {ref.n}")
    if not np.isclose(surv.bin_spacing_hz, ref.bin_spacing_hz, rtol=1e-12):
        raise ParameterError("spectrum bin spacings differ")
    if eps_rel < 0:
        raise ParameterError("eps_rel must be nonnegative")

    power = np.abs(ref.bins) ** 2
    denom = power + eps_rel * float(power.max())
    safe = denom > 0
    bins = np.zeros(surv.n, dtype=complex)
    np.divide(surv.bins * np.conj(ref.bins), denom, out=bins, where=safe)

    fs = surv.sample_rate_hz
    return SpectrumQuotient(
        bins=bins,
        bin_spacing_hz=surv.bin_spacing_hz,
        passband=(-fs / 2, fs / 2),
        valid_mask=np.ones(surv.n, dtype=bool),
    )


def bandpass(q: SpectrumQuotient, lo_hz: float, hi_hz: float) -> SpectrumQuotient:
    """Apply an ideal rectangular band-pass mask in the DFT domain.

    Bins with frequency outside ``[lo_hz, hi_hz]`` (or already invalid)
    are zeroed and masked invalid; in-band bins pass through untouched.
    Idempotent for a fixed passband.
    """
    fs = q.sample_rate_hz
    if lo_hz >= hi_hz:
        raise ParameterError("passband must satisfy lo < hi")
    if lo_hz < -fs / 2 or hi_hz > fs / 2:
        raise ParameterError(f"passband must lie within [{-fs / 2:.6g}, {fs / 2:.6g}] Hz")

    freqs = bin_frequencies(q.n, q.bin_spacing_hz)
    keep = (freqs >= lo_hz) & (freqs <= hi_hz) & q.valid_mask
    if int(keep.sum()) < MIN_VALID_BINS:
        raise ParameterError(
            f"passband [{lo_hz:.6g}, {hi_hz:.6g}] Hz keeps fewer than "
            f"{MIN_VALID_BINS} bins"
        )
    bins = np.where(keep, q.bins, 0.0 + 0.0j)
    return SpectrumQuotient(
        bins=bins,
        bin_spacing_hz=q.bin_spacing_hz,
        passband=(lo_hz, hi_hz),
        valid_mask=keep,
    )
