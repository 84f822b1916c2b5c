"""MUSIC delay estimator operating on the band-passed spectrum quotient.

Each point echo contributes a complex exponential across the quotient's
frequency bins, so delay estimation becomes sinusoid frequency estimation
on the bin index axis with ``omega = -2*pi*bin_spacing*delay``. A single
record yields a single snapshot, so the covariance is estimated by
forward-backward averaging of sliding subvectors. Peaks of the subspace
pseudospectrum map back to delays.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    DEFAULT_MUSIC_GRID_SIZE,
    DEFAULT_MUSIC_MAX_DELAY_S,
    DEFAULT_MUSIC_SUBVECTOR_FRAC,
    DEFAULT_MUSIC_TARGET_LEN,
    SPEED_OF_LIGHT_M_S,
)
from .errors import EmptyResultError, NumericError, ParameterError
from .frontend import SpectrumQuotient
from .ifft_detector import DetectionResult, valley_db

# Floor for the noise-subspace projection; keeps the pseudospectrum finite
# at exact signal frequencies of noiseless data.
_PROJECTION_FLOOR = 1e-30


@dataclass
class MusicInput:
    """In-passband quotient bins in ascending frequency order."""

    x: np.ndarray
    bin_spacing_hz: float

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass
class SyntheticTwoToneModel:
    """Two complex exponentials in white noise; test/oracle data source."""

    amplitudes: tuple
    omegas: tuple
    noise_var: float
    n: int

    def steering_matrix(self) -> np.ndarray:
        idx = np.arange(self.n)
        return np.exp(1j * np.outer(idx, np.asarray(self.omegas)))

    def samples(self, seed: int) -> np.ndarray:
        """Draw one realization ``S @ a + w`` with circular Gaussian noise."""
        x = self.steering_matrix() @ np.asarray(self.amplitudes, dtype=complex)
        if self.noise_var > 0:
            rng = np.random.default_rng(seed)
            scale = math.sqrt(self.noise_var / 2.0)
            x = x + scale * (rng.standard_normal(self.n) + 1j * rng.standard_normal(self.n))
        return x


@dataclass
class CovarianceEstimate:
    """Smoothed covariance of sliding subvectors; Hermitian by construction."""

    r: np.ndarray
    subvector_len: int
    n_snapshots: int
    forward_backward: bool


@dataclass
class SubspaceDecomposition:
    """Eigen-split of a covariance estimate into signal and noise subspaces.

    Eigenvalues are sorted descending; the noise subspace is spanned by the
    trailing ``L - p`` eigenvector columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    p: int
    noise_floor: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def signal_basis(self) -> np.ndarray:
        return self.eigenvectors[:, : self.p]

    @property
    def noise_basis(self) -> np.ndarray:
        return self.eigenvectors[:, self.p :]


@dataclass
class Pseudospectrum:
    """Subspace pseudospectrum sampled on a uniform angular-frequency grid."""

    omegas: np.ndarray
    values: np.ndarray

    @property
    def grid_size(self) -> int:
        return len(self.omegas)


def build_snapshot(q: SpectrumQuotient) -> MusicInput:
    """Extract the contiguous in-passband bins in ascending frequency order.

    For a single echo of delay ``t0`` the snapshot is (up to a constant)
    ``exp(-j*2*pi*bin_spacing*t0*n)``, i.e. a tone at
    ``omega = -2*pi*bin_spacing*t0``.
    """
    mask = np.fft.fftshift(q.valid_mask)
    if not mask.any():
        raise ParameterError("quotient has an empty passband")
    idx = np.nonzero(mask)[0]
    first, last = int(idx[0]), int(idx[-1])
    if last - first + 1 != len(idx):
        raise ParameterError("passband mask is not contiguous in frequency")
    if len(idx) < 8:
        raise ParameterError("need at least 8 in-passband bins")
    bins = np.fft.fftshift(q.bins)[first : last + 1]
    return MusicInput(x=np.asarray(bins, dtype=complex), bin_spacing_hz=q.bin_spacing_hz)


def decimate_snapshot(m: MusicInput, stride: int) -> MusicInput:
    """Keep every ``stride``-th bin, scaling the effective bin spacing.

    Tones survive decimation with ``omega' = stride * omega`` (mod 2*pi);
    the caller must keep ``stride * bin_spacing * max_delay < 1`` so delays
    stay unambiguous. The total frequency aperture, and hence the Fourier
    delay resolution, is preserved.
    """
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    if stride == 1:
        return m
    x = m.x[::stride]
    if len(x) < 8:
        raise ParameterError(f"stride {stride} leaves fewer than 8 bins")
    return MusicInput(x=x, bin_spacing_hz=m.bin_spacing_hz * stride)


def estimate_covariance(
    m: MusicInput, subvector_len: int, forward_backward: bool = True
) -> CovarianceEstimate:
    """Estimate the snapshot covariance by sliding-subvector averaging.

    Averages the outer products of all ``K = n - L + 1`` length-``L``
    sliding subvectors; with ``forward_backward`` the estimate is averaged
    with its exchange-conjugate ``J conj(R) J``. The result is Hermitian
    by construction and PSD up to roundoff.

    Args:
        m: snapshot to analyze.
        subvector_len: ``L``, with ``2 <= L <= n - 1``.
        forward_backward: enable forward-backward averaging.
    """
    n = m.n
    L = int(subvector_len)
    if not 2 <= L <= n - 1:
        raise ParameterError(f"subvector_len must lie in [2, {n - 1}]; got {L}")
    windows = np.lib.stride_tricks.sliding_window_view(m.x, L)  # (K, L)
    k_snapshots = windows.shape[0]
    r = (windows.T @ windows.conj()) / k_snapshots
    if forward_backward:
        r = 0.5 * (r + r[::-1, ::-1].conj())
    r = 0.5 * (r + r.conj().T)
    return CovarianceEstimate(
        r=r,
        subvector_len=L,
        n_snapshots=k_snapshots,
        forward_backward=forward_backward,
    )


def eig_subspace(cov: CovarianceEstimate, p: int) -> SubspaceDecomposition:
    """Eigendecompose a covariance estimate and split off the noise subspace.

    Args:
        cov: Hermitian covariance estimate.
        p: assumed source count, ``1 <= p < L``.

    Raises:
        NumericError: if the eigensolver fails to converge.
    """
    L = cov.subvector_len
    if not 1 <= p < L:
        raise ParameterError(f"p must lie in [1, {L - 1}]; got {p}")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(cov.r)
    except np.linalg.LinAlgError as exc:
        trace = float(np.trace(cov.r).real)
        raise NumericError(
            f"eigendecomposition failed (L={L}, trace={trace:.6g}): {exc}"
        ) from exc
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    noise_floor = float(np.mean(eigenvalues[p:]))
    return SubspaceDecomposition(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        p=p,
        noise_floor=noise_floor,
    )


def pseudospectrum(
    dec: SubspaceDecomposition,
    grid_size: int = DEFAULT_MUSIC_GRID_SIZE,
    omega_lo: float = -math.pi,
    omega_hi: float = math.pi,
) -> Pseudospectrum:
    """Evaluate ``1 / sum_m |s(omega)^H q_m|^2`` over the noise eigenvectors.

    The steering vector is ``s(omega) = [1, e^{j*omega}, ...,
    e^{j*omega*(L-1)}]``. The noise-subspace projection is computed through
    the signal-subspace complement ``L - |s^H Q_signal|^2``, which is
    identical by orthonormal completeness and much cheaper. The projection
    is floored at 1e-30 so the output stays finite and strictly positive.
    """
    if grid_size < 64:
        raise ParameterError("grid_size must be >= 64")
    if not omega_lo < omega_hi:
        raise ParameterError("omega range must satisfy lo < hi")
    omegas = omega_lo + (omega_hi - omega_lo) * np.arange(grid_size) / grid_size
    L = dec.dim
    steering = np.exp(-1j * np.outer(omegas, np.arange(L)))  # rows are s(omega)^H
    sig_proj = np.abs(steering @ dec.signal_basis) ** 2
    noise_power = L - sig_proj.sum(axis=1)
    np.maximum(noise_power, _PROJECTION_FLOOR, out=noise_power)
    return Pseudospectrum(omegas=omegas, values=1.0 / noise_power)


def find_spectrum_peaks(ps: Pseudospectrum, p: int, refine: bool = True) -> list:
    """Locate the ``p`` largest pseudospectrum maxima as (omega, value) pairs.

    Peaks are local maxima of the grid (circular when the grid spans the
    full circle). Sub-grid refinement fits a parabola to the *projection*
    (1/value), whose minimum is locally quadratic, rather than to the
    sharply spiked pseudospectrum itself.
    """
    if p < 1:
        raise ParameterError("p must be >= 1")
    v = ps.values
    n = ps.grid_size
    step = ps.omegas[1] - ps.omegas[0]
    circular = math.isclose((ps.omegas[-1] - ps.omegas[0]) + step, 2 * math.pi, rel_tol=1e-9)

    if circular:
        is_max = (v > np.roll(v, 1)) & (v >= np.roll(v, -1))
    else:
        is_max = np.zeros(n, dtype=bool)
        is_max[1:-1] = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    candidates = np.nonzero(is_max)[0]
    order = candidates[np.argsort(v[candidates])[::-1]]

    accepted = []
    for idx in order:
        dist = [min(abs(idx - j), n - abs(idx - j)) if circular else abs(idx - j) for j in accepted]
        if all(d >= 2 for d in dist):
            accepted.append(int(idx))
        if len(accepted) == p:
            break

    peaks = []
    for idx in accepted:
        omega = float(ps.omegas[idx])
        if refine:
            left = 1.0 / v[(idx - 1) % n] if (circular or idx > 0) else np.inf
            right = 1.0 / v[(idx + 1) % n] if (circular or idx < n - 1) else np.inf
            mid = 1.0 / v[idx]
            denom = left - 2.0 * mid + right
            if math.isfinite(denom) and denom > 0:
                offset = float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))
                omega += offset * step
        peaks.append((omega, float(v[idx])))
    return peaks


def music_delays(
    ps: Pseudospectrum,
    p: int,
    bin_spacing_hz: float,
    refine: bool = True,
) -> DetectionResult:
    """Map pseudospectrum peaks to delays via ``t0 = -omega / (2*pi*df)``.

    Delays are folded into the unambiguous span ``[0, 1/df)`` and returned
    ascending with ``range = c * delay``. Metadata records a shortfall flag
    when fewer than ``p`` maxima exist and the dip between the two
    strongest peaks.
    """
    peaks = find_spectrum_peaks(ps, p, refine=refine)
    if not peaks:
        raise EmptyResultError("pseudospectrum has no local maxima")

    span = 1.0 / bin_spacing_hz
    entries = []
    for omega, value in peaks:
        delay = (-omega / (2.0 * math.pi * bin_spacing_hz)) % span
        entries.append((delay, value, omega))
    entries.sort(key=lambda e: e[0])

    meta = {
        "shortfall": len(peaks) < p,
        "n_requested": p,
        "refined": refine,
        "peak_values": tuple(e[1] for e in entries),
        "peak_omegas": tuple(e[2] for e in entries),
    }
    if len(peaks) >= 2:
        strongest = sorted(peaks, key=lambda e: e[1], reverse=True)[:2]
        i = int(np.argmin(np.abs(ps.omegas - strongest[0][0])))
        j = int(np.argmin(np.abs(ps.omegas - strongest[1][0])))
        meta["valley_db"] = valley_db(ps.values, i, j)

    delays = tuple(e[0] for e in entries)
    ranges = tuple(SPEED_OF_LIGHT_M_S * d for d in delays)
    return DetectionResult(delays_s=delays, ranges_m=ranges, method="MUSIC", metadata=meta)


def detect_music(
    q: SpectrumQuotient,
    n_targets: int = 2,
    target_len: int = DEFAULT_MUSIC_TARGET_LEN,
    subvector_frac: float = DEFAULT_MUSIC_SUBVECTOR_FRAC,
    forward_backward: bool = True,
    grid_size: int = DEFAULT_MUSIC_GRID_SIZE,
    refine: bool = True,
    max_delay_s: float = DEFAULT_MUSIC_MAX_DELAY_S,
) -> tuple[DetectionResult, Pseudospectrum]:
    """Full MUSIC chain from a band-passed quotient to a delay result.

    The snapshot is decimated toward ``target_len`` bins (never so far that
    delays up to ``max_delay_s`` alias), the covariance is estimated with
    subvector length ``subvector_frac * n``, and the pseudospectrum is
    scanned over the full unambiguous circle.
    """
    m = build_snapshot(q)
    stride_cap = max(1, int(1.0 / (m.bin_spacing_hz * 2.0 * max_delay_s)))
    stride = max(1, min(m.n // target_len, stride_cap))
    m = decimate_snapshot(m, stride)

    L = int(round(m.n * subvector_frac))
    L = max(2, min(m.n - 1, L))
    cov = estimate_covariance(m, L, forward_backward=forward_backward)
    dec = eig_subspace(cov, n_targets)
    ps = pseudospectrum(dec, grid_size=grid_size)
    result = music_delays(ps, n_targets, m.bin_spacing_hz, refine=refine)
    result.metadata.update(
        {
            "music_stride": stride,
            "music_snapshot_len": m.n,
            "music_subvector_len": L,
            "music_bin_spacing_hz": m.bin_spacing_hz,
            "music_grid_size": grid_size,
            "music_forward_backward": forward_backward,
        }
    )
    return result, ps
