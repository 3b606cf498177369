"""Artifact writers: delimited tables, PGM images, figures, manifests.

CSV numbers use 17 significant digits with '.' separator and LF line
endings so regression baselines are bit-exact.  Figures are rendered
with the Agg backend next to the delimited output.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError  # noqa: E402
from .signal import SampledSignal, amplitude_spectrum  # noqa: E402

_FMT = ".17g"


def _fmt(x) -> str:
    return format(float(x), _FMT)


def write_csv(path, header, columns) -> None:
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ConfigError("all CSV columns must have equal length")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(c[i]) for c in columns) + "\n")


def write_signal_csv(path, sig: SampledSignal) -> None:
    write_csv(path, ["time_s", "value"], [sig.times, sig.samples])


def read_signal_csv(path, sample_rate=None) -> SampledSignal:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if sample_rate is None:
        if data.shape[0] < 2:
            raise ConfigError("cannot infer sample rate from a single row")
        sample_rate = 1.0 / (data[1, 0] - data[0, 0])
    return SampledSignal(data[:, 1], float(sample_rate))


def write_spectrum_csv(path, sig: SampledSignal, floor_db: float = -200.0) -> None:
    freqs, mag = amplitude_spectrum(sig)
    ref = mag.max() if mag.max() > 0 else 1.0
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(np.maximum(mag / ref, 10 ** (floor_db / 20)))
    write_csv(path, ["freq_hz", "magnitude_db"], [freqs, db])


def write_pattern_csv(path, pattern) -> None:
    theta_deg = np.rad2deg(pattern.theta)
    phi_deg = np.rad2deg(pattern.phi)
    tt, pp = np.meshgrid(theta_deg, phi_deg, indexing="ij")
    write_csv(
        path,
        ["theta_deg", "phi_deg", "value"],
        [tt.ravel(), pp.ravel(), pattern.values.ravel()],
    )


def write_spectrogram_csv(path, spectrogram) -> None:
    L, M = spectrogram.values.shape
    bins, frames = np.meshgrid(np.arange(L), np.arange(M), indexing="ij")
    write_csv(
        path,
        ["frame", "bin", "re", "im"],
        [
            frames.ravel(),
            bins.ravel(),
            spectrogram.values.real.ravel(),
            spectrogram.values.imag.ravel(),
        ],
    )


def write_spectrogram_db_csv(path, spectrogram, floor_db: float = -120.0) -> None:
    db = spectrogram.magnitude_db(floor_db)
    L, M = db.shape
    bins, frames = np.meshgrid(np.arange(L), np.arange(M), indexing="ij")
    write_csv(
        path,
        ["frame", "bin", "magnitude_db"],
        [frames.ravel(), bins.ravel(), db.ravel()],
    )


# ---------------------------------------------------------------------------
# PGM (plain P2 / binary P5, 8-bit)


def write_pgm(path, image: np.ndarray, binary: bool = True) -> None:
    img = np.asarray(image)
    if img.dtype != np.uint8:
        lo, hi = float(img.min()), float(img.max())
        scale = 255.0 / (hi - lo) if hi > lo else 0.0
        img = np.round((img - lo) * scale).astype(np.uint8)
    h, w = img.shape
    if binary:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode())
            fh.write(img.tobytes())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(f"P2\n{w} {h}\n255\n")
            for row in img:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"P2", b"P5"):
        raise ConfigError(f"{path} is not a P2/P5 PGM file")
    binary = data[:2] == b"P5"
    # strip comments, gather header tokens
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    w, h, maxval = (int(t) for t in tokens)
    if maxval > 255:
        raise ConfigError("only 8-bit PGM supported")
    if binary:
        pos += 1  # single whitespace after maxval
        img = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8)
    else:
        img = np.array(data[pos:].split(), dtype=np.uint8)
    return img.reshape(h, w)


# ---------------------------------------------------------------------------
# Figures


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata={"Software": "awgris"})
    plt.close(fig)


def plot_signal(path, sig: SampledSignal, title="received signal") -> None:
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(sig.times * 1e3, sig.samples, lw=0.8)
    ax.set_xlabel("time [ms]")
    ax.set_ylabel("amplitude")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_spectrum(path, sig: SampledSignal, title="spectrum") -> None:
    freqs, mag = amplitude_spectrum(sig)
    ref = mag.max() if mag.max() > 0 else 1.0
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(np.maximum(mag / ref, 1e-10))
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(freqs / 1e3, db, lw=0.8)
    ax.set_xlabel("frequency [kHz]")
    ax.set_ylabel("magnitude [dB]")
    ax.set_ylim(-120, 5)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_pattern(path, pattern, title="beam pattern") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    theta_deg = np.rad2deg(pattern.theta)
    if pattern.values.shape[1] == 1:
        vals = pattern.values[:, 0]
        ref = vals.max() if vals.max() > 0 else 1.0
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(np.maximum(vals / ref, 1e-8))
        ax.plot(theta_deg, db)
        ax.set_xlabel("theta [deg]")
        ax.set_ylabel("normalized power [dB]")
        ax.set_ylim(-40, 2)
    else:
        im = ax.imshow(
            pattern.values,
            origin="lower",
            aspect="auto",
            extent=[
                float(np.rad2deg(pattern.phi[0])),
                float(np.rad2deg(pattern.phi[-1])),
                theta_deg[0],
                theta_deg[-1],
            ],
        )
        ax.set_xlabel("phi [deg]")
        ax.set_ylabel("theta [deg]")
        fig.colorbar(im, ax=ax, label="normalized power")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_spectrogram(path, spectrogram, title="spectrogram") -> None:
    db = spectrogram.magnitude_db(-80.0)
    L = db.shape[0]
    shifted = np.roll(db, L // 2, axis=0)
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(shifted, origin="lower", aspect="auto", cmap="magma")
    ax.set_xlabel("frame")
    ax.set_ylabel("frequency bin (shifted)")
    fig.colorbar(im, ax=ax, label="magnitude [dB]")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


# ---------------------------------------------------------------------------
# Manifest


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, files) -> str:
    """Write manifest.json listing every artifact with its content hash."""
    entries = {
        os.path.basename(str(f)): sha256_of(f) for f in sorted(files, key=str)
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", newline="") as fh:
        json.dump({"files": entries}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
