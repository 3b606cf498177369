"""Inverse design of DAC control signals.

Single-input design maps a target waveform through the inverse
magnitude projection and the regularized inverse control filter.
Multi-input design splits a wideband target into band-limited
components via a masked STFT, then designs each input separately.
Spectrogram-image targets are treated as magnitude-only STFTs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .control import ControlCircuitModel, apply_response, inverse_filter, reliable_band
from .diode import (
    UnitModel,
    inverse_magnitude_map_array,
    magnitude_map_array,
    magnitude_range,
)
from .errors import ConfigError, CoverageError, DomainError, FeasibilityError
from .signal import SampledSignal

HAMMING_A0 = 25.0 / 46.0


@dataclass(frozen=True)
class StftPlan:
    dft_len: int
    hop: int
    window: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if not (1 <= self.hop <= self.dft_len):
            raise ConfigError("require 1 <= hop <= dft_len")
        window = np.asarray(self.window, dtype=float)
        if len(window) != self.dft_len:
            raise ConfigError("window length must equal dft_len")
        object.__setattr__(self, "window", window)
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")

    @staticmethod
    def hamming(dft_len: int, hop: int, sample_rate: float) -> "StftPlan":
        return StftPlan(dft_len, hop, hamming_window(dft_len), sample_rate)

    def bin_freq(self, l: int) -> float:
        """Center frequency (Hz) of bin l, signed (l > L/2 maps negative)."""
        l = l if l <= self.dft_len // 2 else l - self.dft_len
        return l * self.sample_rate / self.dft_len


@dataclass(frozen=True)
class Spectrogram:
    values: np.ndarray  # complex (L, M_frames)
    plan: StftPlan

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[0] != self.plan.dft_len:
            raise ConfigError("values must be (dft_len, n_frames)")
        object.__setattr__(self, "values", values)

    @property
    def num_frames(self) -> int:
        return self.values.shape[1]

    def magnitude_db(self, floor_db: float = -120.0) -> np.ndarray:
        mag = np.abs(self.values)
        ref = mag.max() if mag.max() > 0 else 1.0
        with np.errstate(divide="ignore"):
            db = 20 * np.log10(mag / ref)
        return np.maximum(db, floor_db)


@dataclass(frozen=True)
class BandAssignment:
    """Disjoint sets of frequency-bin indices, one per analog input."""

    bands: tuple

    def __post_init__(self):
        bands = tuple(tuple(sorted(int(i) for i in b)) for b in self.bands)
        object.__setattr__(self, "bands", bands)
        seen = set()
        for b in bands:
            s = set(b)
            if s & seen:
                raise ConfigError("band assignments must be pairwise disjoint")
            seen |= s

    def __len__(self):
        return len(self.bands)

    def validate(self, dft_len: int, real_target: bool = True):
        for b in self.bands:
            for i in b:
                if not (0 <= i < dft_len):
                    raise ConfigError(f"bin index {i} outside [0, {dft_len})")
            if real_target:
                s = set(b)
                for i in b:
                    if (dft_len - i) % dft_len not in s:
                        raise ConfigError(
                            f"real-signal band must include the conjugate "
                            f"mirror of bin {i}"
                        )


def dft_matrix(L: int) -> np.ndarray:
    """Unitary DFT matrix with primitive root e^{-j 2 pi / L}."""
    if L < 1:
        raise DomainError("L must be >= 1")
    idx = np.arange(L)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / L) / np.sqrt(L)


def hamming_window(L: int) -> np.ndarray:
    """Symmetric raised-cosine window with a0 = 25/46.

    Defined on n in [-L/2, L/2-1] and stored shifted to [0, L-1], so the
    stored peak value 1.0 sits at index L/2.
    """
    if L % 2 != 0:
        raise DomainError("window length must be even")
    n = np.arange(L) - L // 2
    return HAMMING_A0 + (1 - HAMMING_A0) * np.cos(2 * np.pi * n / L)


def hankelize(b: np.ndarray, L: int, hop: int) -> np.ndarray:
    """Frame a vector into an (L, floor(len/hop)) matrix with hop offsets.

    Reads past the end of the vector are zero-padded.
    """
    if L < 1 or hop < 1:
        raise DomainError("L and hop must be >= 1")
    b = np.asarray(b, dtype=float)
    n_frames = len(b) // hop
    padded = np.concatenate([b, np.zeros(L)])
    out = np.empty((L, n_frames))
    for j in range(n_frames):
        out[:, j] = padded[j * hop : j * hop + L]
    return out


def stft(y: SampledSignal, plan: StftPlan) -> Spectrogram:
    """Windowed framewise unitary DFT of the signal."""
    if y.sample_rate != plan.sample_rate:
        raise ConfigError(
            f"signal rate {y.sample_rate} != plan rate {plan.sample_rate}"
        )
    frames = hankelize(np.asarray(y.samples, dtype=float), plan.dft_len, plan.hop)
    windowed = plan.window[:, None] * frames
    return Spectrogram(dft_matrix(plan.dft_len) @ windowed, plan)


def istft(S: Spectrogram, length: int | None = None) -> SampledSignal:
    """Weighted overlap-add reconstruction.

    Synthesis reuses the analysis window and normalizes each sample by
    the accumulated squared window, which makes istft(stft(y)) exact on
    every covered sample.
    """
    plan = S.plan
    L, hop = plan.dft_len, plan.hop
    if hop > L:
        raise CoverageError("hop must not exceed dft_len for full coverage")
    frames = dft_matrix(L).conj().T @ S.values
    n_frames = S.num_frames
    total = (n_frames - 1) * hop + L if n_frames > 0 else 0
    num = np.zeros(total)
    den = np.zeros(total)
    w = plan.window
    w2 = w**2
    for j in range(n_frames):
        sl = slice(j * hop, j * hop + L)
        num[sl] += w * frames[:, j].real
        den[sl] += w2
    if length is None:
        length = total
    elif length > total:
        raise CoverageError(
            f"requested {length} samples but analysis frames cover only {total}"
        )
    num = num[:length]
    den = den[:length]
    if np.any(den == 0):
        raise CoverageError("window/hop combination leaves uncovered samples")
    return SampledSignal(num / den, plan.sample_rate)


def band_mask(S: Spectrogram, omega_set) -> Spectrogram:
    """Keep the selected frequency-bin rows, zero all others."""
    idx = np.asarray(sorted(int(i) for i in omega_set), dtype=int)
    if len(idx) and (idx.min() < 0 or idx.max() >= S.plan.dft_len):
        raise ConfigError("bin index outside spectrogram")
    out = np.zeros_like(S.values)
    out[idx] = S.values[idx]
    return Spectrogram(out, S.plan)


def _affine_params(lo_t, hi_t, lo_r, hi_r):
    """Scale/offset mapping [lo_t, hi_t] onto [lo_r, hi_r]."""
    span_t = hi_t - lo_t
    if span_t == 0:
        return 0.0, 0.5 * (lo_r + hi_r)
    a = (hi_r - lo_r) / span_t
    return a, lo_r - a * lo_t


def usable_magnitude_range(unit: UnitModel, carrier_omega: float, margin: float = 0.01):
    m_lo, m_hi = magnitude_range(unit, carrier_omega)
    span = m_hi - m_lo
    return m_lo + margin * span, m_hi


def _check_band(target: SampledSignal, cc: ControlCircuitModel, reg_eps: float):
    """Reject targets whose energy extends beyond the reliable band."""
    band = reliable_band(cc, reg_eps)
    x = np.asarray(target.samples, dtype=float)
    x = x - x.mean()
    spec = np.abs(np.fft.rfft(x))
    peak = spec.max()
    if peak == 0:
        return
    freqs = np.fft.rfftfreq(len(x), d=1.0 / target.sample_rate)
    significant = spec >= peak * 10 ** (-60 / 20)
    f_max = freqs[significant].max() if np.any(significant) else 0.0
    if f_max > band[1] * (1 + 1e-9):
        raise FeasibilityError(
            f"target energy extends to {f_max:.6g} Hz, beyond the control "
            f"circuit's reliable band {band}",
            band=band,
        )


def _design_from_scaled(
    scaled: np.ndarray,
    rate: float,
    unit: UnitModel,
    cc: ControlCircuitModel,
    carrier_omega: float,
    reg_eps: float,
) -> SampledSignal:
    v = inverse_magnitude_map_array(unit, scaled, carrier_omega)
    if len(cc.taps) == 1:
        # flat network: skip deconvolution, just undo the scalar gain
        x = v / cc.taps[0]
    else:
        inv = inverse_filter(cc, reg_eps)
        x = apply_response(inv, SampledSignal(v, rate), steady_state=True).samples
    return SampledSignal(x, rate, unit="volt")


def design_single_input(
    target: SampledSignal,
    unit: UnitModel,
    cc: ControlCircuitModel,
    carrier_omega: float,
    margin: float = 0.01,
    reg_eps: float = 1e-6,
) -> SampledSignal:
    """DAC voltage trace whose forward simulation reproduces the target shape.

    The target is affinely mapped onto the achievable magnitude span
    (minus a safety margin above the conduction threshold), inverted
    through the magnitude projection sample by sample, then deconvolved
    through the regularized inverse of the control circuit.
    """
    if target.sample_rate != cc.sample_rate:
        raise ConfigError("target and control circuit must share a sample rate")
    _check_band(target, cc, reg_eps)
    y = np.asarray(target.samples, dtype=float)
    lo_r, hi_r = usable_magnitude_range(unit, carrier_omega, margin)
    a, b = _affine_params(y.min(), y.max(), lo_r, hi_r)
    return _design_from_scaled(a * y + b, target.sample_rate, unit, cc, carrier_omega, reg_eps)


def forward_magnitude(
    x: SampledSignal, unit: UnitModel, cc: ControlCircuitModel, carrier_omega: float
) -> SampledSignal:
    """Forward-simulated RC magnitude trace of one driven unit."""
    v = apply_response(cc, x, steady_state=True).samples
    return SampledSignal(
        magnitude_map_array(unit, v, carrier_omega), x.sample_rate
    )


def design_multi_input(
    target: SampledSignal,
    bands: BandAssignment,
    plan: StftPlan,
    unit: UnitModel,
    cc_per_input,
    carrier_omega: float,
    margin: float = 0.01,
    reg_eps: float = 1e-6,
) -> list[SampledSignal]:
    """Split the target across band-limited inputs and design each one.

    All components share one affine scale so that the magnitude-domain
    sum of the forward simulations reproduces the target shape up to a
    dc offset.
    """
    if isinstance(cc_per_input, ControlCircuitModel):
        cc_per_input = [cc_per_input] * len(bands)
    if len(cc_per_input) != len(bands):
        raise ConfigError("need one control circuit per input")
    bands.validate(plan.dft_len, real_target=True)
    _check_target_coverage(target, bands, plan)

    S = stft(target, plan)
    n = len(target)
    components = [
        np.asarray(istft(band_mask(S, omega), length=min(n, _covered(S))).samples)
        for omega in bands.bands
    ]
    lo_r, hi_r = usable_magnitude_range(unit, carrier_omega, margin)
    half = 0.5 * (hi_r - lo_r)
    mid = 0.5 * (hi_r + lo_r)
    max_dev = max(np.max(np.abs(c - 0.5 * (c.min() + c.max()))) for c in components)
    scale = half / max_dev if max_dev > 0 else 0.0
    out = []
    for comp, cc in zip(components, cc_per_input):
        center = 0.5 * (comp.min() + comp.max())
        scaled = mid + scale * (comp - center)
        out.append(
            _design_from_scaled(scaled, plan.sample_rate, unit, cc, carrier_omega, reg_eps)
        )
    return out


def _covered(S: Spectrogram) -> int:
    return (S.num_frames - 1) * S.plan.hop + S.plan.dft_len if S.num_frames else 0


def _check_target_coverage(target: SampledSignal, bands: BandAssignment, plan: StftPlan):
    """Every bin carrying target energy above -60 dB of peak must be assigned."""
    S = stft(target, plan)
    row_energy = np.abs(S.values).max(axis=1)
    peak = row_energy.max()
    if peak == 0:
        return
    assigned = set()
    for b in bands.bands:
        assigned |= set(b)
    hot = np.nonzero(row_energy >= peak * 10 ** (-60 / 20))[0]
    missing = [int(l) for l in hot if int(l) not in assigned]
    if missing:
        raise ConfigError(
            f"target has energy in unassigned bins {missing[:8]}"
            + ("..." if len(missing) > 8 else "")
        )


def symmetrize_image(image: np.ndarray) -> np.ndarray:
    """Enforce conjugate-consistency of a magnitude-spectrogram image.

    Rows are in FFT-shifted order (dc at row L/2); the image is mirrored
    about the dc row and averaged, with a warning when the input was
    asymmetric.
    """
    image = np.asarray(image, dtype=float)
    L = image.shape[0]
    shifted = np.roll(image, -(L // 2), axis=0)  # row 0 becomes dc
    mirrored = np.roll(shifted[::-1], 1, axis=0)  # bin l -> bin (L-l) % L
    if not np.allclose(shifted, mirrored, atol=1e-9 * max(1.0, image.max())):
        warnings.warn("spectrogram image was not vertically symmetric; symmetrized")
    sym = 0.5 * (shifted + mirrored)
    return np.roll(sym, L // 2, axis=0)


def image_to_spectrogram(image: np.ndarray, plan: StftPlan) -> Spectrogram:
    """Magnitude-only spectrogram from a grayscale image (zero phase).

    Image rows are FFT-shifted frequencies (lowest at row 0, dc at row
    L/2); columns are frames.
    """
    image = np.asarray(image, dtype=float)
    if image.shape[0] != plan.dft_len:
        raise ConfigError(
            f"image row count {image.shape[0]} must equal dft_len {plan.dft_len}"
        )
    sym = symmetrize_image(image)
    bins = np.roll(sym, -(plan.dft_len // 2), axis=0)
    return Spectrogram(bins.astype(complex), plan)


def image_to_control(
    image: np.ndarray,
    plan: StftPlan,
    unit: UnitModel,
    cc: ControlCircuitModel,
    carrier_omega: float,
    margin: float = 0.01,
    reg_eps: float = 1e-6,
) -> SampledSignal:
    """Control signal whose emitted spectrogram matches a grayscale image."""
    S = image_to_spectrogram(image, plan)
    y = istft(S)
    if not np.any(np.asarray(y.samples)):
        # all-black image: hold the mid-range carrier-only level
        lo_r, hi_r = usable_magnitude_range(unit, carrier_omega, margin)
        mid = 0.5 * (lo_r + hi_r)
        return _design_from_scaled(
            np.full(len(y), mid), plan.sample_rate, unit, cc, carrier_omega, reg_eps
        )
    return design_single_input(y, unit, cc, carrier_omega, margin, reg_eps)


def spectrogram_image_correlation(
    S: Spectrogram, image: np.ndarray, dc_guard: int = 2
) -> float:
    """In-band magnitude correlation of a re-analyzed spectrogram with a
    target image.

    Rows within ``dc_guard`` bins of dc are excluded: the synthesis
    affine map adds a dc offset whose window main lobe leaks there.
    """
    tgt = np.abs(image_to_spectrogram(image, S.plan).values)
    mag = np.abs(S.values)
    m = min(mag.shape[1], tgt.shape[1])
    L = S.plan.dft_len
    rows = np.nonzero(tgt.max(axis=1) > 0)[0]
    rows = rows[np.minimum(rows, L - rows) > dc_guard]
    return normalized_correlation(mag[rows, :m], tgt[rows, :m])


def normalized_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-lag normalized cross-correlation after mean removal."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    a = a - a.mean()
    b = b - b.mean()
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0:
        return 0.0
    return float(np.dot(a, b) / denom)
