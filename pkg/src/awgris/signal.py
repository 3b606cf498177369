"""Uniformly sampled signals and elementary waveform generators.

All waveforms here are plain real baseband traces; voltage scaling for
driving diodes is applied by the synthesis / scenario layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

VOLT = "volt"
DIMENSIONLESS = "dimensionless"


@dataclass(frozen=True)
class SampledSignal:
    """A uniformly sampled real (or complex-envelope) signal."""

    samples: np.ndarray
    sample_rate: float
    unit: str = DIMENSIONLESS

    def __post_init__(self):
        samples = np.asarray(self.samples)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(np.abs(samples))):
            raise DomainError("signal contains non-finite samples")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    def with_samples(self, samples) -> "SampledSignal":
        return SampledSignal(np.asarray(samples), self.sample_rate, self.unit)


def time_grid(sample_rate: float, duration: float) -> np.ndarray:
    n = int(round(duration * sample_rate))
    return np.arange(n) / sample_rate


def sine_wave(freq, sample_rate, duration, amplitude=1.0, offset=0.0, phase=0.0):
    t = time_grid(sample_rate, duration)
    return SampledSignal(offset + amplitude * np.sin(2 * np.pi * freq * t + phase), sample_rate)


def square_wave(freq, sample_rate, duration, amplitude=1.0, offset=0.0, phase=0.0):
    t = time_grid(sample_rate, duration)
    return SampledSignal(
        offset + amplitude * np.sign(np.sin(2 * np.pi * freq * t + phase)), sample_rate
    )


def gauss_pulse(center, width, sample_rate, duration, amplitude=1.0, offset=0.0):
    """Gaussian pulse centered at `center` seconds with std-dev `width`."""
    t = time_grid(sample_rate, duration)
    return SampledSignal(
        offset + amplitude * np.exp(-0.5 * ((t - center) / width) ** 2), sample_rate
    )


def sinc_pulse(center, main_lobe_freq, sample_rate, duration, amplitude=1.0, offset=0.0):
    t = time_grid(sample_rate, duration)
    return SampledSignal(
        offset + amplitude * np.sinc(2 * main_lobe_freq * (t - center)), sample_rate
    )


def chirp(f0, f1, sample_rate, duration, amplitude=1.0, offset=0.0):
    """Linear chirp sweeping f0 -> f1 across the record."""
    t = time_grid(sample_rate, duration)
    rate = (f1 - f0) / duration
    phase = 2 * np.pi * (f0 * t + 0.5 * rate * t**2)
    return SampledSignal(offset + amplitude * np.sin(phase), sample_rate)


WAVEFORM_KINDS = ("sine", "square", "gauss-pulse", "sinc", "chirp", "file")


def make_waveform(spec: dict, sample_rate: float, duration: float) -> SampledSignal:
    """Build a waveform from a literal config spec.

    The spec is a dict with a ``kind`` key; remaining keys are parameters
    of the corresponding generator. ``file`` reads a two-column CSV
    (time_s, value) and uses the value column verbatim.
    """
    kind = spec.get("kind")
    amp = float(spec.get("amplitude", 1.0))
    off = float(spec.get("offset", 0.0))
    if kind == "sine":
        return sine_wave(
            float(spec["freq_hz"]), sample_rate, duration, amp, off,
            np.deg2rad(float(spec.get("phase_deg", 0.0))),
        )
    if kind == "square":
        return square_wave(
            float(spec["freq_hz"]), sample_rate, duration, amp, off,
            np.deg2rad(float(spec.get("phase_deg", 0.0))),
        )
    if kind == "gauss-pulse":
        return gauss_pulse(
            float(spec.get("center_s", duration / 2)), float(spec["width_s"]),
            sample_rate, duration, amp, off,
        )
    if kind == "sinc":
        return sinc_pulse(
            float(spec.get("center_s", duration / 2)), float(spec["main_lobe_hz"]),
            sample_rate, duration, amp, off,
        )
    if kind == "chirp":
        return chirp(
            float(spec["f0_hz"]), float(spec["f1_hz"]), sample_rate, duration, amp, off
        )
    if kind == "file":
        data = np.loadtxt(spec["path"], delimiter=",", skiprows=1)
        return SampledSignal(off + amp * data[:, 1], sample_rate)
    raise ConfigError(f"unknown waveform kind {kind!r} (expected one of {WAVEFORM_KINDS})")


def amplitude_spectrum(sig: SampledSignal):
    """One-sided amplitude spectrum: (freqs_hz, magnitude) arrays."""
    n = len(sig)
    spec = np.fft.rfft(np.asarray(sig.samples, dtype=float)) / n
    mag = np.abs(spec)
    mag[1:] *= 2.0  # fold negative frequencies
    freqs = np.fft.rfftfreq(n, d=1.0 / sig.sample_rate)
    return freqs, mag
