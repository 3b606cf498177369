"""Artifact writers: CSV formats, PGM images, manifests."""

import hashlib
import json

import numpy as np
import pytest

from awgris import reporting
from awgris.signal import SampledSignal

FS = 1e6


def test_csv_format_17_digits_lf(tmp_path):
    path = tmp_path / "t.csv"
    reporting.write_csv(path, ["a", "b"], [[1 / 3], [2.0]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    text = raw.decode()
    assert text.splitlines()[0] == "a,b"
    assert "0.33333333333333331" in text


def test_signal_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    sig = SampledSignal(rng.normal(size=200), FS)
    path = tmp_path / "sig.csv"
    reporting.write_signal_csv(path, sig)
    back = reporting.read_signal_csv(path)
    assert np.array_equal(back.samples, sig.samples)  # %.17g round-trips doubles
    assert back.sample_rate == pytest.approx(FS)


def test_spectrum_csv_headers(tmp_path):
    sig = SampledSignal(np.sin(np.linspace(0, 20 * np.pi, 500)), FS)
    path = tmp_path / "spec.csv"
    reporting.write_spectrum_csv(path, sig)
    header = path.read_text().splitlines()[0]
    assert header == "freq_hz,magnitude_db"


def test_pgm_round_trips(tmp_path):
    rng = np.random.default_rng(4)
    img = rng.integers(0, 256, size=(16, 9), dtype=np.uint8)
    p5 = tmp_path / "a.pgm"
    p2 = tmp_path / "b.pgm"
    reporting.write_pgm(p5, img, binary=True)
    reporting.write_pgm(p2, img, binary=False)
    assert np.array_equal(reporting.read_pgm(p5), img)
    assert np.array_equal(reporting.read_pgm(p2), img)


def test_pgm_comment_handling(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P2\n# a comment\n2 2\n255\n0 64\n128 255\n")
    img = reporting.read_pgm(path)
    assert np.array_equal(img, [[0, 64], [128, 255]])


def test_pgm_float_input_rescaled(tmp_path):
    path = tmp_path / "f.pgm"
    reporting.write_pgm(path, np.array([[0.0, 0.5], [1.0, 0.25]]))
    img = reporting.read_pgm(path)
    assert img.min() == 0 and img.max() == 255


def test_manifest_lists_every_file_with_correct_hash(tmp_path):
    files = []
    for i in range(3):
        p = tmp_path / f"f{i}.csv"
        p.write_text(f"data{i}\n")
        files.append(str(p))
    manifest_path = reporting.write_manifest(str(tmp_path), files)
    manifest = json.loads(open(manifest_path).read())
    assert set(manifest["files"]) == {"f0.csv", "f1.csv", "f2.csv"}
    for name, digest in manifest["files"].items():
        raw = (tmp_path / name).read_bytes()
        assert digest == hashlib.sha256(raw).hexdigest()


def test_plots_render_to_files(tmp_path):
    sig = SampledSignal(np.sin(np.linspace(0, 20 * np.pi, 500)), FS)
    for name, fn in [
        ("sig.png", lambda p: reporting.plot_signal(p, sig)),
        ("spec.png", lambda p: reporting.plot_spectrum(p, sig)),
    ]:
        path = tmp_path / name
        fn(str(path))
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
