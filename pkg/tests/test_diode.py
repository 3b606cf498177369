"""Unit electrical model: impedances, reflection maps, inverses."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awgris.diode import (
    DiodeModel,
    default_unit,
    inverse_magnitude_map,
    inverse_magnitude_map_array,
    magnitude_map,
    magnitude_map_array,
    magnitude_range,
    phase_deviation,
    pin_impedance,
    rc_state,
    reflection_coefficient,
)
from awgris.errors import DomainError, RangeError

OMEGA = 2 * math.pi * 5.8e9


def test_off_state_package_impedance():
    # oracle: 2 + j*w*0.7nH + 1/(j*w*1.8pF) at 5.8 GHz, plain complex math
    z = pin_impedance(DiodeModel(), 0.0, OMEGA)
    assert z == pytest.approx(2 + 10.265005997350714j, rel=1e-12)


def test_on_resistance_at_reference_bias_is_reference_value():
    d = DiodeModel()
    assert d.r_on(d.v_ref) == pytest.approx(d.r_on_ref, rel=1e-15)


def test_on_resistance_decreases_with_bias():
    d = DiodeModel()
    volts = np.linspace(d.v_forward, d.v_ref, 101)
    r = np.array([d.r_on(v) for v in volts])
    assert np.all(np.diff(r) < 0)


def test_magnitude_map_frozen_values():
    # oracle: series impedance assembled with plain-python complex numbers
    unit = default_unit()
    assert magnitude_map(unit, 0.7, OMEGA) == pytest.approx(0.091124364155827, rel=1e-12)
    assert magnitude_map(unit, 0.95, OMEGA) == pytest.approx(0.8974240335409966, rel=1e-12)
    assert magnitude_map(unit, 1.2, OMEGA) == pytest.approx(0.9432989690724777, rel=1e-12)


def test_magnitude_map_strictly_increasing():
    unit = default_unit()
    volts = np.linspace(unit.v_forward, unit.v_ref, 1001)
    mags = magnitude_map_array(unit, volts, OMEGA)
    assert np.all(np.diff(mags) > 0)


def test_magnitude_map_rejects_off_branch_bias():
    unit = default_unit()
    with pytest.raises(DomainError):
        magnitude_map(unit, 0.3, OMEGA)
    with pytest.raises(DomainError):
        magnitude_map_array(unit, np.array([0.8, 0.5]), OMEGA)


def test_vectorized_map_matches_scalar():
    unit = default_unit()
    volts = np.linspace(unit.v_forward, unit.v_ref, 57)
    vec = magnitude_map_array(unit, volts, OMEGA)
    ref = np.array([magnitude_map(unit, v, OMEGA) for v in volts])
    assert np.max(np.abs(vec - ref)) < 1e-15


@given(st.floats(min_value=0.7, max_value=1.2))
@settings(max_examples=100, deadline=None)
def test_inverse_round_trip(v):
    unit = default_unit()
    mag = magnitude_map(unit, v, OMEGA)
    v_back = inverse_magnitude_map(unit, mag, OMEGA)
    assert abs(magnitude_map(unit, v_back, OMEGA) - mag) < 1e-8


def test_vectorized_inverse_round_trip():
    unit = default_unit()
    volts = np.linspace(unit.v_forward, unit.v_ref, 301)
    mags = magnitude_map_array(unit, volts, OMEGA)
    back = inverse_magnitude_map_array(unit, mags, OMEGA)
    assert np.max(np.abs(back - volts)) < 1e-9


def test_inverse_rejects_unreachable_magnitude():
    unit = default_unit()
    lo, hi = magnitude_range(unit, OMEGA)
    with pytest.raises(RangeError) as err:
        inverse_magnitude_map(unit, hi + 0.01, OMEGA)
    assert err.value.achievable_min == pytest.approx(lo)
    assert err.value.achievable_max == pytest.approx(hi)


def test_reflection_phase_near_on_design_value():
    # the physical RC phase is not pi exactly; the declared states carry it
    unit = default_unit()
    gamma = reflection_coefficient(unit, unit.v_ref, OMEGA)
    assert abs(gamma) < 1.0
    mag, phase = rc_state(unit, unit.v_ref, OMEGA)
    assert phase == pytest.approx(unit.phi_on)


def test_phase_deviation_linear_endpoints():
    unit = default_unit()
    assert phase_deviation(unit, unit.v_ref) == 0.0
    assert phase_deviation(unit, unit.v_forward) == pytest.approx(unit.phase_jitter)
    mid = 0.5 * (unit.v_forward + unit.v_ref)
    assert phase_deviation(unit, mid) == pytest.approx(0.5 * unit.phase_jitter)


def test_off_state_declared_rc():
    unit = default_unit()
    mag, phase = rc_state(unit, 0.0, OMEGA)
    assert mag == unit.alpha
    assert phase == unit.phi_off


def test_model_validation():
    with pytest.raises(DomainError):
        DiodeModel(v_ref=0.5)  # below v_forward
    with pytest.raises(DomainError):
        DiodeModel(r_on_ref=-1.0)
    with pytest.raises(DomainError):
        default_unit(alpha=1.5)


def test_default_unit_overrides_route_to_diode():
    unit = default_unit(r_on_ref=20.0, alpha=0.9)
    assert unit.diode.r_on_ref == 20.0
    assert unit.alpha == 0.9
