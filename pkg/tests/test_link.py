"""Receiver link model: summation, noise seeding, dc removal, efficiency."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awgris.array import Codebook
from awgris.errors import ConfigError
from awgris.link import (
    LinkConfig,
    ac_components,
    dc_filter,
    modulation_efficiency,
    modulation_efficiency_norm,
    received_signal,
)
from awgris.signal import SampledSignal

FS = 1e6


def test_noiseless_reception_is_scaled_row_sum():
    A = np.array([[1.0, 2.0, 3.0], [0.5, 0.5, 0.5]])
    cb = Codebook(np.array([1, 0]))
    y = received_signal(A, FS, cb, LinkConfig(beam_gain=2.0))
    assert np.array_equal(y.samples, 2.0 * A.sum(axis=0))


def test_noise_is_seed_reproducible():
    A = np.zeros((1, 256))
    cb = Codebook(np.array([1]))
    link = LinkConfig(noise_std=0.1, seed=42)
    y1 = received_signal(A, FS, cb, link)
    y2 = received_signal(A, FS, cb, link)
    assert np.array_equal(y1.samples, y2.samples)
    y3 = received_signal(A, FS, cb, LinkConfig(noise_std=0.1, seed=43))
    assert not np.array_equal(y1.samples, y3.samples)


def test_dc_filter_zeroes_window_means():
    rng = np.random.default_rng(0)
    y = SampledSignal(rng.normal(5.0, 1.0, 4000), FS)
    link = LinkConfig(dc_window=1e-3)  # 1000-sample windows
    ac = dc_filter(y, link).samples
    for start in range(0, 4000, 1000):
        assert abs(ac[start : start + 1000].mean()) < 1e-12


def test_dc_filter_long_window_degrades_to_full_mean():
    y = SampledSignal(np.arange(10.0), FS)
    ac = dc_filter(y, LinkConfig(dc_window=10.0)).samples
    assert abs(ac.mean()) < 1e-12


def test_ac_components_remove_row_means():
    A = np.array([[1.0, 3.0], [2.0, 2.0]])
    ac = ac_components(A)
    assert np.allclose(ac.mean(axis=1), 0.0)


def test_efficiency_zero_for_all_off_and_constant():
    A = np.full((4, 100), 0.98)
    assert modulation_efficiency(A, Codebook(np.zeros(4, dtype=int))) == 0.0
    assert modulation_efficiency(A, Codebook(np.ones(4, dtype=int))) == 0.0


def test_efficiency_closed_form_single_sine():
    # one ON unit, A = m + a*sin: ac energy a^2/2, total m^2 + a^2/2
    t = np.arange(10000) / FS
    m, a = 0.5, 0.3
    A = (m + a * np.sin(2 * np.pi * 1e4 * t))[None, :]
    eta = modulation_efficiency(A, Codebook(np.array([1])))
    assert eta == pytest.approx((a**2 / 2) / (m**2 + a**2 / 2), rel=1e-6)


def test_adding_off_units_never_increases_efficiency():
    rng = np.random.default_rng(7)
    A_on = rng.uniform(0.1, 0.9, size=(3, 200))
    bits = [1, 1, 1]
    eta = modulation_efficiency(A_on, Codebook(np.array(bits)))
    A_more = np.vstack([A_on, np.full((2, 200), 0.98)])
    eta_more = modulation_efficiency(A_more, Codebook(np.array(bits + [0, 0])))
    assert eta_more <= eta


@given(st.integers(min_value=0, max_value=2**16), st.integers(min_value=1, max_value=6))
@settings(max_examples=60, deadline=None)
def test_efficiency_bounded(seed, n_units):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 1.0, size=(n_units, 64))
    bits = rng.integers(0, 2, n_units)
    eta = modulation_efficiency(A, Codebook(bits))
    assert 0.0 <= eta <= 1.0
    eta_n = modulation_efficiency_norm(A, Codebook(bits))
    assert 0.0 <= eta_n <= 1.0


def test_shape_validation():
    with pytest.raises(ConfigError):
        received_signal(np.zeros((2, 10)), FS, Codebook(np.array([1])), LinkConfig())
    with pytest.raises(ConfigError):
        LinkConfig(beam_gain=0.0)
    with pytest.raises(ConfigError):
        LinkConfig(noise_std=-0.1)
