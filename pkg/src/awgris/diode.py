"""PIN-diode unit electrical model and its reflection-coefficient maps.

The unit is a series network of the diode package and the patch RF
elements terminated against free space.  While the diode conducts, the
reflection magnitude is a strictly increasing, injective function of the
bias voltage (here called the magnitude map); the phase stays near the
ON-state design value.  Below the conduction voltage the unit presents a
fixed OFF-state reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, RangeError, SingularityError

Z0_FREE_SPACE = 377.0


@dataclass(frozen=True)
class DiodeModel:
    """Bias-dependent PIN diode equivalent circuit.

    While conducting, the series resistance follows a saturating power
    law of the overdrive voltage; at zero bias the diode is a lossy
    series LC.  ``v_knee`` keeps the resistance finite at the conduction
    threshold so the magnitude map stays monotone and invertible on the
    closed interval [v_forward, v_ref].
    """

    r_on_ref: float = 10.0     # ohm at v_ref
    v_forward: float = 0.7     # volt
    v_ref: float = 1.2         # volt
    slope: float = 1.0
    l_p: float = 0.7e-9        # henry
    c_p: float = 1.8e-12       # farad
    r_p0: float = 2.0          # ohm, zero-bias series loss
    v_knee: float = 0.0165     # volt, resistance-law saturation offset

    def __post_init__(self):
        if not (self.v_forward > 0 and self.v_ref > self.v_forward):
            raise DomainError("require 0 < v_forward < v_ref")
        if self.r_on_ref <= 0 or self.l_p <= 0 or self.c_p <= 0:
            raise DomainError("r_on_ref, l_p, c_p must be positive")
        if self.slope <= 0 or self.v_knee <= 0:
            raise DomainError("slope and v_knee must be positive")

    def r_on(self, v_ab: float) -> float:
        """Forward-bias series resistance at bias v_ab >= v_forward."""
        span = self.v_ref - self.v_forward
        return self.r_on_ref * (
            (span + self.v_knee) / (v_ab - self.v_forward + self.v_knee)
        ) ** self.slope


@dataclass(frozen=True)
class UnitModel:
    """Full unit: diode plus patch RF elements and declared RC states."""

    diode: DiodeModel
    r_rf: float = 1.0          # ohm
    l_rf: float = 0.3e-9       # henry
    c_rf: float = 7.53e-13     # farad (near series resonance at 5.8 GHz)
    z0: float = Z0_FREE_SPACE
    phi_on: float = math.pi    # radian
    phi_off: float = 0.0       # radian
    alpha: float = 0.98        # OFF-state RC magnitude
    phase_jitter: float = math.radians(5.0)

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise DomainError("alpha must lie in (0, 1]")
        if self.r_rf < 0 or self.l_rf <= 0 or self.c_rf <= 0 or self.z0 <= 0:
            raise DomainError("RF elements and z0 must be positive")

    @property
    def v_forward(self) -> float:
        return self.diode.v_forward

    @property
    def v_ref(self) -> float:
        return self.diode.v_ref


def pin_impedance(model: DiodeModel, v_ab: float, omega: float) -> complex:
    """Diode package impedance at bias v_ab and angular frequency omega."""
    if not (np.isfinite(v_ab) and np.isfinite(omega)):
        raise DomainError("non-finite bias or frequency")
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega}")
    if v_ab < model.v_forward:
        return model.r_p0 + 1j * omega * model.l_p + 1.0 / (1j * omega * model.c_p)
    return model.r_on(v_ab) + 1j * omega * model.l_p


def effective_impedance(unit: UnitModel, v_ab: float, omega: float) -> complex:
    """Series impedance of diode package plus patch RF elements."""
    z_pin = pin_impedance(unit.diode, v_ab, omega)
    return z_pin + unit.r_rf + 1j * omega * unit.l_rf + 1.0 / (1j * omega * unit.c_rf)


def reflection_coefficient(unit: UnitModel, v_ab: float, omega: float) -> complex:
    """Complex RC of the unit against free space."""
    z_eff = effective_impedance(unit, v_ab, omega)
    denom = z_eff + unit.z0
    if abs(denom) < 1e-12 * unit.z0:
        raise SingularityError(f"Z_eff = -z0 ({z_eff:.6g}) is nonphysical")
    return (z_eff - unit.z0) / denom


def magnitude_map(unit: UnitModel, v_ab: float, omega: float) -> float:
    """RC magnitude while conducting -- the forward projection.

    Strictly increasing in v_ab on [v_forward, v_ref] for the default
    parameter set (resistance falls with bias toward the mismatch side
    of the free-space impedance).
    """
    if v_ab < unit.v_forward:
        raise DomainError(
            f"magnitude map is defined for v_ab >= v_forward "
            f"({unit.v_forward} V); got {v_ab} V (use rc_state for the OFF branch)"
        )
    return abs(reflection_coefficient(unit, v_ab, omega))


def magnitude_map_array(unit: UnitModel, v_ab: np.ndarray, omega: float) -> np.ndarray:
    """Vectorized forward projection over an array of ON-branch biases."""
    v_ab = np.asarray(v_ab, dtype=float)
    if np.any(v_ab < unit.v_forward):
        raise DomainError("all biases must satisfy v_ab >= v_forward")
    d = unit.diode
    span = d.v_ref - d.v_forward
    r_on = d.r_on_ref * ((span + d.v_knee) / (v_ab - d.v_forward + d.v_knee)) ** d.slope
    z_eff = (
        r_on
        + unit.r_rf
        + 1j * omega * (d.l_p + unit.l_rf)
        + 1.0 / (1j * omega * unit.c_rf)
    )
    return np.abs((z_eff - unit.z0) / (z_eff + unit.z0))


def magnitude_range(unit: UnitModel, omega: float) -> tuple[float, float]:
    """Achievable (min, max) RC magnitude over [v_forward, v_ref]."""
    return (
        magnitude_map(unit, unit.v_forward, omega),
        magnitude_map(unit, unit.v_ref, omega),
    )


_BISECTION_TOL = 1e-9
_BISECTION_MAX_ITER = 200


def inverse_magnitude_map(unit: UnitModel, target_mag: float, omega: float) -> float:
    """Bias voltage achieving a given RC magnitude (inverse projection)."""
    lo, hi = unit.v_forward, unit.v_ref
    m_lo, m_hi = magnitude_map(unit, lo, omega), magnitude_map(unit, hi, omega)
    if not (m_lo <= target_mag <= m_hi):
        raise RangeError(
            f"target magnitude {target_mag:.6g} outside achievable "
            f"[{m_lo:.6g}, {m_hi:.6g}]",
            m_lo,
            m_hi,
        )
    for _ in range(_BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        m_mid = magnitude_map(unit, mid, omega)
        if abs(m_mid - target_mag) <= _BISECTION_TOL:
            return mid
        if m_mid < target_mag:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def inverse_magnitude_map_array(unit: UnitModel, targets: np.ndarray, omega: float) -> np.ndarray:
    """Vectorized inverse projection by bisection on the monotone map."""
    targets = np.asarray(targets, dtype=float)
    m_lo, m_hi = magnitude_range(unit, omega)
    if targets.min() < m_lo - 1e-15 or targets.max() > m_hi + 1e-15:
        raise RangeError(
            f"targets outside achievable [{m_lo:.6g}, {m_hi:.6g}]", m_lo, m_hi
        )
    clipped = np.clip(targets, m_lo, m_hi)
    v_lo = np.full_like(clipped, unit.v_forward)
    v_hi = np.full_like(clipped, unit.v_ref)
    for _ in range(60):
        v_mid = 0.5 * (v_lo + v_hi)
        below = magnitude_map_array(unit, v_mid, omega) < clipped
        v_lo = np.where(below, v_mid, v_lo)
        v_hi = np.where(below, v_hi, v_mid)
        if np.max(v_hi - v_lo) < 1e-13:
            break
    return 0.5 * (v_lo + v_hi)


def phase_deviation(unit: UnitModel, v_ab: float) -> float:
    """Deterministic ON-state phase deviation; largest near v_forward."""
    span = unit.v_ref - unit.v_forward
    frac = np.clip((unit.v_ref - v_ab) / span, 0.0, 1.0)
    return unit.phase_jitter * frac


def rc_state(unit: UnitModel, v_ab: float, omega: float) -> tuple[float, float]:
    """(magnitude, phase) of the unit RC at bias v_ab."""
    if v_ab >= unit.v_forward:
        return magnitude_map(unit, v_ab, omega), unit.phi_on + phase_deviation(unit, v_ab)
    return unit.alpha, unit.phi_off


def default_unit(**overrides) -> UnitModel:
    """Calibrated default unit (5.8 GHz design).

    The default parameter set is calibrated so a full-span sinusoidal
    magnitude sweep yields a modulation efficiency near 25%.
    """
    diode_fields = {f for f in DiodeModel.__dataclass_fields__}
    diode_kwargs = {k: overrides.pop(k) for k in list(overrides) if k in diode_fields}
    diode = replace(DiodeModel(), **diode_kwargs)
    return UnitModel(diode=diode, **overrides)


def unit_from_config(cfg: dict) -> UnitModel:
    """Build a UnitModel from a flat JSON-compatible mapping (SI units)."""
    return default_unit(**{k: float(v) for k, v in cfg.items()})
