"""Array geometry, codebooks, beam patterns and magnitude traces."""

import numpy as np
import pytest

from awgris.array import (
    ArrayScene,
    Codebook,
    Wiring,
    beam_pattern,
    design_codebook,
    scattered_field,
    steering_incident,
    steering_outgoing,
    waveform_factor,
)
from awgris.control import identity_circuit
from awgris.diode import default_unit, magnitude_map
from awgris.errors import ConfigError, ModulationUnderflowError
from awgris.signal import SampledSignal

C = 299792458.0
F0 = 5.8e9


def linear_scene(cols=16, **kwargs):
    kwargs.setdefault("incidence", "plane")
    kwargs.setdefault("feed_pos", np.array([0.0, 0.0, 0.5]))
    wavelength = C / F0
    return ArrayScene(1, cols, 0.5 * wavelength, carrier_freq=F0, **kwargs)


def test_unit_positions_row_major_centered():
    scene = ArrayScene(2, 3, 1.0, np.array([0, 0, 0.5]), F0)
    pos = scene.unit_positions()
    # oracle: x = m - 1, y = n - 0.5, row-major k = n*3 + m
    expected = [
        (-1.0, -0.5, 0.0), (0.0, -0.5, 0.0), (1.0, -0.5, 0.0),
        (-1.0, 0.5, 0.0), (0.0, 0.5, 0.0), (1.0, 0.5, 0.0),
    ]
    assert np.allclose(pos, expected)


def test_spherical_delay_and_weight():
    scene = ArrayScene(2, 3, 1.0, np.array([0, 0, 0.5]), F0)
    # oracle: unit 0 at (-1, -0.5, 0), feed at (0, 0, 0.5)
    assert scene.incident_delays()[0] == pytest.approx(4.085309148743125e-09, rel=1e-12)
    assert scene.incident_weights()[0] == pytest.approx(0.8164965809277261, rel=1e-12)


def test_plane_normal_incidence_has_equal_delays():
    scene = linear_scene()
    assert np.allclose(scene.incident_delays(), 0.0)
    assert np.allclose(scene.incident_weights(), 1.0)
    assert np.allclose(steering_incident(scene), 1.0)


def test_broadside_codebook_is_uniform():
    scene = linear_scene()
    cb = design_codebook(scene, 0.0)
    assert len(set(cb.bits.tolist())) == 1


def test_steered_codebook_hits_target_bin():
    scene = linear_scene()
    # 1-bit quantization can pull shallow steers a couple of degrees
    for theta_deg, tol in ((30.0, 1.0), (45.0, 2.0), (60.0, 1.0)):
        cb = design_codebook(scene, np.deg2rad(theta_deg))
        pattern = beam_pattern(scene, cb)
        theta, _ = pattern.argmax_direction()
        assert abs(np.rad2deg(theta) - theta_deg) <= tol


def test_pattern_integral_is_one():
    scene = linear_scene()
    cb = design_codebook(scene, np.deg2rad(30.0))
    pattern = beam_pattern(scene, cb)
    assert pattern.integral() == pytest.approx(1.0, rel=1e-12)


def test_literal_quadratic_sum_is_direction_independent():
    scene = linear_scene()
    cb = design_codebook(scene, np.deg2rad(30.0))
    pattern = beam_pattern(scene, cb, literal_quadratic_sum=True)
    assert np.ptp(pattern.values) < 1e-12 * pattern.values.max()


def test_outgoing_steering_normal_direction():
    scene = linear_scene()
    assert np.allclose(steering_outgoing(scene, 0.0, 0.0), 1.0)


def test_wiring_column_groups():
    w = Wiring.column_groups(1, 16, 4)
    assert np.array_equal(w.input_of_unit, np.repeat(np.arange(4), 4))
    with pytest.raises(ConfigError):
        Wiring.column_groups(1, 16, 5)


def test_codebook_validation():
    with pytest.raises(ConfigError):
        Codebook(np.array([0, 2, 1]))


def test_waveform_factor_off_units_hold_alpha():
    unit = default_unit()
    cb = Codebook(np.array([1, 0, 1, 0]))
    wiring = Wiring.single(4)
    cc = identity_circuit(1e6)
    x = SampledSignal(np.linspace(0.8, 1.1, 50), 1e6)
    A = waveform_factor(cb, wiring, unit, cc, [x], 2 * np.pi * F0)
    assert np.all(A[1] == unit.alpha)
    assert np.all(A[3] == unit.alpha)
    # ON rows equal the scalar magnitude map of the drive, sample by sample
    ref = np.array([magnitude_map(unit, v, 2 * np.pi * F0) for v in x.samples])
    assert np.max(np.abs(A[0] - ref)) < 1e-14
    assert np.array_equal(A[0], A[2])


def test_waveform_factor_underflow_reports_sample():
    unit = default_unit()
    cb = Codebook(np.ones(4, dtype=int))
    cc = identity_circuit(1e6)
    v = np.full(30, 0.9)
    v[17] = 0.6
    with pytest.raises(ModulationUnderflowError) as err:
        waveform_factor(cb, Wiring.single(4), unit, cc, [SampledSignal(v, 1e6)], 2 * np.pi * F0)
    assert err.value.sample_index == 17


def test_waveform_factor_input_count_checked():
    cb = Codebook(np.ones(4, dtype=int))
    cc = identity_circuit(1e6)
    x = SampledSignal(np.full(10, 0.9), 1e6)
    with pytest.raises(ConfigError):
        waveform_factor(cb, Wiring.column_groups(1, 4, 2), default_unit(), cc, [x], 2 * np.pi * F0)


def test_scattered_field_matches_manual_sum():
    scene = linear_scene(cols=4, incidence="spherical")
    cb = Codebook(np.array([1, 1, 0, 1]))
    wiring = Wiring.single(4)
    cc = identity_circuit(1e6)
    x = SampledSignal(np.linspace(0.85, 1.05, 20), 1e6)
    inc = SampledSignal(np.ones(20), 1e6)
    direction = (np.deg2rad(25.0), 0.0)
    env = scattered_field(scene, cb, wiring, cc, [x], direction, 2.0, inc)

    A = waveform_factor(cb, wiring, scene.unit, cc, [x], scene.omega)
    psi = np.where(cb.bits == 1, scene.unit.phi_on, scene.unit.phi_off)
    coeff = (
        steering_outgoing(scene, *direction)
        * np.exp(1j * psi)
        * scene.incident_weights()
        * steering_incident(scene)
    )
    ref = (coeff @ A) / 2.0
    assert np.max(np.abs(env.samples - ref)) < 1e-12
