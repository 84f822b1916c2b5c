"""Bit-exact serialization of signals, spectra, profiles, and results.

All text outputs use a fixed field order, '.' decimal separator, and '\\n'
newlines, so identical runs produce byte-identical files. The binary
signal format is little-endian: an 8-byte magic, a u32 sample count, then
(re, im) float64 pairs.
"""

import csv
import math
import struct

import numpy as np

from .errors import ParameterError
from .frontend import Spectrum, SpectrumQuotient, bin_frequencies
from .ifft_detector import DetectionResult, RangeProfile
from .music_detector import Pseudospectrum
from .signal_model import SampledSignal

SIGNAL_MAGIC = b"FMPRSIG1"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def write_signal_csv(path, sig: SampledSignal) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "re", "im"])
        for i, z in enumerate(sig.samples):
            writer.writerow([i, _fmt(z.real), _fmt(z.imag)])


def read_signal_csv(path, sample_rate_hz: float) -> SampledSignal:
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "re", "im"]:
            raise ParameterError(f"unexpected signal CSV header: {header}")
        samples = np.array([complex(float(r[1]), float(r[2])) for r in reader])
    return SampledSignal(samples=samples, sample_rate_hz=sample_rate_hz)


def write_signal_binary(path, sig: SampledSignal) -> None:
    interleaved = np.empty(2 * sig.n, dtype="<f8")
    interleaved[0::2] = sig.samples.real
    interleaved[1::2] = sig.samples.imag
    with open(path, "wb") as fh:
        fh.write(SIGNAL_MAGIC)
        fh.write(struct.pack("<I", sig.n))
        fh.write(interleaved.tobytes())


def read_signal_binary(path, sample_rate_hz: float) -> SampledSignal:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != SIGNAL_MAGIC:
            raise ParameterError(f"bad magic {magic!r}; expected {SIGNAL_MAGIC!r}")
        (count,) = struct.unpack("<I", fh.read(4))
        raw = np.frombuffer(fh.read(16 * count), dtype="<f8")
    if len(raw) != 2 * count:
        raise ParameterError("truncated binary signal file")
    return SampledSignal(samples=raw[0::2] + 1j * raw[1::2], sample_rate_hz=sample_rate_hz)


def write_spectrum_csv(path, spec) -> None:
    """Spectrum or quotient as ``freq_hz,re,im,valid`` rows."""
    if isinstance(spec, SpectrumQuotient):
        valid = spec.valid_mask
        center = 0.0
    elif isinstance(spec, Spectrum):
        valid = np.ones(spec.n, dtype=bool)
        center = spec.center_hz
    else:
        raise ParameterError(f"cannot serialize {type(spec).__name__} as spectrum CSV")
    freqs = bin_frequencies(spec.n, spec.bin_spacing_hz) + center
    order = np.argsort(freqs, kind="stable")
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["freq_hz", "re", "im", "valid"])
        for i in order:
            z = spec.bins[i]
            writer.writerow([_fmt(freqs[i]), _fmt(z.real), _fmt(z.imag), int(valid[i])])


def write_profile_csv(path, profile: RangeProfile) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lag_s", "value"])
        for i, v in enumerate(profile.values):
            writer.writerow([_fmt(i * profile.lag_step_s), _fmt(v)])


def write_pseudospectrum_csv(path, ps: Pseudospectrum, bin_spacing_hz: float) -> None:
    span = 1.0 / bin_spacing_hz
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega_rad", "delay_s", "p_music"])
        for omega, value in zip(ps.omegas, ps.values):
            delay = (-omega / (2.0 * math.pi * bin_spacing_hz)) % span
            writer.writerow([_fmt(omega), _fmt(delay), _fmt(value)])


def _flatten(value) -> str:
    if isinstance(value, (tuple, list, np.ndarray)):
        return ";".join(_fmt(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return _fmt(value)


def write_result_record(path, result: DetectionResult) -> None:
    """Flat key-value text record of a detection result."""
    lines = [
        f"method = {result.method}",
        f"delays_s = {_flatten(result.delays_s)}",
        f"ranges_m = {_flatten(result.ranges_m)}",
    ]
    for key in sorted(result.metadata):
        lines.append(f"meta.{key} = {_flatten(result.metadata[key])}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_table_csv(path, table_rows: list) -> None:
    """Resolution table: one row per channel count plus improvement column."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["channel_count", "ifft_resolution_m", "music_resolution_m", "improvement_pct"])
        for row in table_rows:
            writer.writerow([row[0], _fmt(row[1]), _fmt(row[2]), _fmt(row[3])])
