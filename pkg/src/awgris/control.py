"""Bias/control network between a DAC output and the diode terminals.

The network is modeled as a causal FIR response.  The default response
is a discretized second-order low-pass (series RLC step behavior); an
identity (single-tap) response stands in for an ideally flat network.
A Tikhonov-regularized frequency-domain inverse supports waveform
predistortion.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateFilterError, DomainError
from .signal import SampledSignal


@dataclass(frozen=True)
class ControlCircuitModel:
    """FIR model of the control circuit."""

    taps: np.ndarray
    sample_rate: float
    passband: tuple[float, float]  # (f_lo, f_hi) Hz

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        object.__setattr__(self, "taps", taps)
        if taps.ndim != 1 or len(taps) == 0:
            raise ConfigError("taps must be a nonempty 1-D array")
        if not np.all(np.isfinite(taps)):
            raise DomainError("taps contain non-finite values")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate must be positive")
        f_lo, f_hi = self.passband
        if not (0 <= f_lo < f_hi):
            raise ConfigError(f"invalid passband {self.passband}")
        if self.sample_rate <= 2 * f_hi:
            raise ConfigError(
                f"sample_rate {self.sample_rate} must exceed twice the passband "
                f"edge {f_hi}"
            )

    def frequency_response(self, freqs_hz: np.ndarray) -> np.ndarray:
        """DTFT of the tap sequence at the given frequencies."""
        freqs_hz = np.asarray(freqs_hz, dtype=float)
        n = np.arange(len(self.taps))
        phase = np.exp(
            -2j * np.pi * np.outer(freqs_hz, n) / self.sample_rate
        )
        return phase @ self.taps


def identity_circuit(sample_rate: float, passband=None) -> ControlCircuitModel:
    """Single-tap allpass network (ideally flat control circuit)."""
    if passband is None:
        passband = (0.0, 0.45 * sample_rate)
    return ControlCircuitModel(np.array([1.0]), sample_rate, passband)


def rlc_lowpass_circuit(
    sample_rate: float,
    cutoff_hz: float,
    damping: float = 1.0,
    num_taps: int = 256,
    passband=None,
) -> ControlCircuitModel:
    """Second-order low-pass FIR from a sampled RLC impulse response.

    The impulse response of the underdamped/critically damped section is
    sampled and normalized to unit DC gain.
    """
    if cutoff_hz <= 0 or cutoff_hz >= sample_rate / 2:
        raise ConfigError("cutoff must lie inside (0, sample_rate/2)")
    w0 = 2 * np.pi * cutoff_hz
    # h(0) = 0 exactly for this family; skip it so the discrete response
    # has no leading pure delay (keeps the regularized inverse causal)
    t = np.arange(1, num_taps + 1) / sample_rate
    if damping >= 1.0:
        # critically damped (or treat overdamped as critical for simplicity)
        h = w0**2 * t * np.exp(-w0 * t)
    else:
        wd = w0 * np.sqrt(1 - damping**2)
        h = (w0**2 / wd) * np.exp(-damping * w0 * t) * np.sin(wd * t)
    total = h.sum()
    if total == 0:
        raise DegenerateFilterError("degenerate RLC discretization")
    h = h / total
    if passband is None:
        passband = (0.0, 0.5 * cutoff_hz)
    return ControlCircuitModel(h, sample_rate, passband)


def _fft_convolve_full(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a) + len(b) - 1
    nfft = 1 << (n - 1).bit_length()
    out = np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)
    return out[:n]


def apply_response(
    cc: ControlCircuitModel, v: SampledSignal, steady_state: bool = False
) -> SampledSignal:
    """Causal convolution with the circuit taps, truncated to len(v).

    With ``steady_state`` the input is assumed to have held its first
    value for all earlier time, which removes the zero-state start-up
    transient (used by the diode-facing forward paths, where a transient
    through zero would spuriously cut the diode off).
    """
    if v.sample_rate != cc.sample_rate:
        raise ConfigError(
            f"signal rate {v.sample_rate} != circuit rate {cc.sample_rate}"
        )
    x = np.asarray(v.samples, dtype=float)
    if steady_state and len(cc.taps) > 1:
        pad = len(cc.taps) - 1
        x_ext = np.concatenate([np.full(pad, x[0]), x])
        full = _fft_convolve_full(cc.taps, x_ext)
        return v.with_samples(full[pad : pad + len(x)])
    full = _fft_convolve_full(cc.taps, x)
    return v.with_samples(full[: len(x)])


def inverse_filter(
    cc: ControlCircuitModel, reg_eps: float = 1e-6, n_fft: int = 4096
) -> ControlCircuitModel:
    """Tikhonov-regularized inverse of the circuit on an FFT grid.

    Within the passband, wherever |H| >= 10*sqrt(reg_eps)*max|H|, the
    cascade satisfies |G*H - 1| <= 0.02.
    """
    if reg_eps <= 0:
        raise DomainError("reg_eps must be positive")
    taps = cc.taps
    if not np.any(taps):
        raise DegenerateFilterError("all-zero impulse response has no inverse")
    n_fft = max(n_fft, 4 * len(taps))
    H = np.fft.rfft(taps, n_fft)
    h_max2 = np.max(np.abs(H)) ** 2
    G = np.conj(H) / (np.abs(H) ** 2 + reg_eps * h_max2)
    g = np.fft.irfft(G, n_fft)
    return ControlCircuitModel(g, cc.sample_rate, cc.passband)


def flatness_metric(cc: ControlCircuitModel, n_points: int = 1024):
    """(ripple_db, min_gain_db) of |H(f)| over the declared passband."""
    f_lo, f_hi = cc.passband
    if f_hi <= f_lo:
        raise ConfigError("empty passband")
    freqs = np.linspace(f_lo, f_hi, n_points)
    mags = np.abs(cc.frequency_response(freqs))
    if np.any(mags <= 0):
        return float("inf"), float("-inf")
    gains_db = 20 * np.log10(mags)
    return float(gains_db.max() - gains_db.min()), float(gains_db.min())


def reliable_band(cc: ControlCircuitModel, reg_eps: float = 1e-6, n_points: int = 2048):
    """(f_lo, f_hi) of the contiguous low-frequency region where the
    regularized inverse is accurate (|H| >= 10*sqrt(reg_eps)*max|H|),
    scanned up to Nyquist."""
    freqs = np.linspace(0.0, cc.sample_rate / 2, n_points)
    mags = np.abs(cc.frequency_response(freqs))
    thresh = 10 * np.sqrt(reg_eps) * mags.max()
    ok = mags >= thresh
    if not ok[0]:
        return (0.0, 0.0)
    last = np.argmin(ok) - 1 if not ok.all() else len(ok) - 1
    return (0.0, float(freqs[last]))


def save_taps_csv(cc: ControlCircuitModel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in enumerate(cc.taps):
            writer.writerow([i, format(v, ".17g")])


def load_taps_csv(path, sample_rate: float, passband) -> ControlCircuitModel:
    taps = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for row in reader:
            taps.append(float(row[1]))
    return ControlCircuitModel(np.array(taps), sample_rate, tuple(passband))


def circuit_from_config(cfg: dict, sample_rate: float) -> ControlCircuitModel:
    """Build a circuit from a scenario config entry."""
    kind = cfg.get("type", "impulse")
    passband = cfg.get("passband")
    if kind == "impulse":
        return identity_circuit(
            sample_rate, tuple(passband) if passband else None
        )
    if kind == "rlc":
        return rlc_lowpass_circuit(
            sample_rate,
            float(cfg["cutoff_hz"]),
            damping=float(cfg.get("damping", 1.0)),
            num_taps=int(cfg.get("num_taps", 256)),
            passband=tuple(passband) if passband else None,
        )
    if kind == "taps":
        if passband is None:
            raise ConfigError("taps circuit requires an explicit passband")
        return load_taps_csv(cfg["path"], sample_rate, tuple(passband))
    raise ConfigError(f"unknown control-circuit type {kind!r}")
