"""IFFT-based delay detector: invert the filtered quotient and pick peaks."""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_MIN_SEP_BINS, SPEED_OF_LIGHT_M_S
from .errors import EmptyResultError, ParameterError
from .frontend import SpectrumQuotient

METHODS = ("IFFT", "MUSIC")


@dataclass
class RangeProfile:
    """Real-valued delay profile: re(IFFT) of the band-passed quotient."""

    values: np.ndarray
    lag_step_s: float

    @property
    def length(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Peak:
    lag_s: float
    value: float
    index: int
    refined: bool


@dataclass
class DetectionResult:
    """Estimated delays/ranges with peak metadata, common to both detectors."""

    delays_s: tuple
    ranges_m: tuple
    method: str
    metadata: dict = field(default_factory=dict)


def ifft_profile(q: SpectrumQuotient, use_magnitude: bool = False) -> RangeProfile:
    """Inverse-transform a quotient into a delay profile.

    By default the profile is the real part of the inverse DFT; set
    ``use_magnitude`` for a diagnostic magnitude profile. For a noiseless
    single echo at an integer-sample delay ``d`` with a full passband the
    argmax falls exactly at index ``d``.
    """
    if not q.valid_mask.any():
        raise ParameterError("quotient has an empty passband")
    z = np.fft.ifft(q.bins)
    values = np.abs(z) if use_magnitude else z.real
    return RangeProfile(values=values, lag_step_s=1.0 / q.sample_rate_hz)


def _parabolic_offset(y_left: float, y_mid: float, y_right: float) -> float:
    denom = y_left - 2.0 * y_mid + y_right
    if denom >= 0.0 or not math.isfinite(denom):
        return 0.0
    offset = 0.5 * (y_left - y_right) / denom
    return float(np.clip(offset, -0.5, 0.5))


def find_peaks(
    profile: RangeProfile,
    k: int,
    min_sep_bins: int = DEFAULT_MIN_SEP_BINS,
    refine: bool = True,
) -> list:
    """Pick the ``k`` strongest local extrema, greedily by absolute value.

    Peak strength is ranked on ``abs(values)``: an echo's real-part pulse
    is scaled by the cosine of its carrier-delay phase, which can invert
    the pulse without moving it, so a strong negative extremum is still a
    detection. ``Peak.value`` keeps the signed profile value. Accepted
    peaks are pairwise at least ``min_sep_bins`` apart (circular index
    distance). With ``refine`` a 3-point parabolic fit on the magnitude
    supplies a sub-bin lag. Returns peaks sorted by lag; fewer than ``k``
    are returned when the profile has fewer acceptable extrema.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    if min_sep_bins < 1:
        raise ParameterError("min_sep_bins must be >= 1")

    v = profile.values
    mag = np.abs(v)
    n = profile.length
    is_max = (mag > np.roll(mag, 1)) & (mag >= np.roll(mag, -1))
    candidates = np.nonzero(is_max)[0]
    order = candidates[np.argsort(mag[candidates])[::-1]]

    accepted = []
    for idx in order:
        dist = [min(abs(idx - j), n - abs(idx - j)) for j in accepted]
        if all(d >= min_sep_bins for d in dist):
            accepted.append(int(idx))
        if len(accepted) == k:
            break

    peaks = []
    for idx in accepted:
        offset = 0.0
        if refine:
            offset = _parabolic_offset(mag[(idx - 1) % n], mag[idx], mag[(idx + 1) % n])
        peaks.append(
            Peak(
                lag_s=(idx + offset) * profile.lag_step_s,
                value=float(v[idx]),
                index=idx,
                refined=refine,
            )
        )
    peaks.sort(key=lambda p: p.lag_s)
    return peaks


def lags_to_result(peaks: list, method: str, metadata: dict | None = None) -> DetectionResult:
    """Convert peak lags into a delay/range result (range = c * delay)."""
    if method not in METHODS:
        raise ParameterError(f"method must be one of {METHODS}")
    if not peaks:
        raise EmptyResultError("no peaks to convert")
    ordered = sorted(peaks, key=lambda p: p.lag_s)
    delays = tuple(p.lag_s for p in ordered)
    ranges = tuple(SPEED_OF_LIGHT_M_S * d for d in delays)
    meta = dict(metadata) if metadata else {}
    meta.setdefault("peak_values", tuple(p.value for p in ordered))
    return DetectionResult(delays_s=delays, ranges_m=ranges, method=method, metadata=meta)


def valley_db(values: np.ndarray, i: int, j: int) -> float:
    """Depth of the dip between two profile indices, in dB below the
    smaller peak. Non-positive dips count as fully resolved (-inf)."""
    lo, hi = sorted((int(i), int(j)))
    if hi - lo < 2:
        return 0.0
    segment = values[lo + 1 : hi]
    smallest_peak = float(min(values[lo], values[hi]))
    dip = float(segment.min())
    if smallest_peak <= 0.0:
        return 0.0
    if dip <= 0.0:
        return float("-inf")
    return 10.0 * math.log10(dip / smallest_peak)


def detect_ifft(
    q: SpectrumQuotient,
    n_targets: int = 2,
    min_sep_bins: int = DEFAULT_MIN_SEP_BINS,
    refine: bool = True,
    use_magnitude: bool = False,
) -> tuple[DetectionResult, RangeProfile]:
    """Full IFFT chain: profile, peak picking, delay/range conversion.

    The result metadata records the peak values, a shortfall flag when
    fewer than ``n_targets`` maxima exist, and the dip between the two
    strongest peaks (``valley_db``).
    """
    profile = ifft_profile(q, use_magnitude=use_magnitude)
    peaks = find_peaks(profile, n_targets, min_sep_bins=min_sep_bins, refine=refine)
    meta = {
        "shortfall": len(peaks) < n_targets,
        "n_requested": n_targets,
        "refined": refine,
        "profile_kind": "magnitude" if use_magnitude else "real",
    }
    if len(peaks) >= 2:
        strongest = sorted(peaks, key=lambda p: abs(p.value), reverse=True)[:2]
        meta["valley_db"] = valley_db(
            np.abs(profile.values), strongest[0].index, strongest[1].index
        )
    result = lags_to_result(peaks, "IFFT", metadata=meta)
    return result, profile
