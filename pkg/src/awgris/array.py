"""Planar-array scattering: steering vectors, factors, patterns, fields.

The array lies in the z=0 plane centered at the origin, rows along y and
columns along x, with row-major unit flattening k = n*cols + m.  The
feed is either a near-field spherical source at a fixed position or an
incident plane wave.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .control import ControlCircuitModel, apply_response
from .diode import UnitModel, default_unit, magnitude_map_array
from .errors import ConfigError, GeometryError, ModulationUnderflowError
from .signal import SampledSignal

C_LIGHT = 299792458.0

SPHERICAL = "spherical"
PLANE = "plane"


@dataclass(frozen=True)
class ArrayScene:
    rows: int
    cols: int
    spacing: float
    feed_pos: np.ndarray
    carrier_freq: float
    incidence: str = SPHERICAL
    plane_direction: np.ndarray | None = None  # propagation direction, plane mode
    unit: UnitModel = field(default_factory=default_unit)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("rows and cols must be >= 1")
        if self.spacing <= 0 or self.carrier_freq <= 0:
            raise ConfigError("spacing and carrier_freq must be positive")
        feed = np.asarray(self.feed_pos, dtype=float).reshape(3)
        object.__setattr__(self, "feed_pos", feed)
        if self.incidence == SPHERICAL:
            if abs(feed[2]) < 1e-12:
                raise ConfigError("spherical feed must not be coplanar with the array")
        elif self.incidence == PLANE:
            d = self.plane_direction
            d = np.array([0.0, 0.0, -1.0]) if d is None else np.asarray(d, dtype=float)
            norm = np.linalg.norm(d)
            if norm == 0:
                raise ConfigError("plane_direction must be nonzero")
            object.__setattr__(self, "plane_direction", d / norm)
        else:
            raise ConfigError(f"unknown incidence mode {self.incidence!r}")

    @property
    def num_units(self) -> int:
        return self.rows * self.cols

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.carrier_freq

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_freq

    def unit_positions(self) -> np.ndarray:
        """(num_units, 3) positions, row-major, centered at the origin."""
        m = np.arange(self.cols) - (self.cols - 1) / 2
        n = np.arange(self.rows) - (self.rows - 1) / 2
        xx, yy = np.meshgrid(m * self.spacing, n * self.spacing)
        pos = np.zeros((self.num_units, 3))
        pos[:, 0] = xx.ravel()
        pos[:, 1] = yy.ravel()
        return pos

    def incident_delays(self) -> np.ndarray:
        """Per-unit incident propagation delays tau_k^(i) in seconds."""
        pos = self.unit_positions()
        if self.incidence == SPHERICAL:
            dist = np.linalg.norm(pos - self.feed_pos, axis=1)
            if np.any(dist < 1e-9):
                raise GeometryError("feed coincides with a unit")
            return dist / C_LIGHT
        return pos @ self.plane_direction / C_LIGHT

    def incident_weights(self) -> np.ndarray:
        """Per-unit incident amplitude weights (1/distance spherical, 1 plane)."""
        if self.incidence == SPHERICAL:
            return 1.0 / (self.incident_delays() * C_LIGHT)
        return np.ones(self.num_units)


@dataclass(frozen=True)
class Codebook:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=int).ravel()
        if not np.all((bits == 0) | (bits == 1)):
            raise ConfigError("codebook bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class Wiring:
    """Maps unit index k to the DAC input index (0-based) driving it."""

    input_of_unit: np.ndarray
    num_inputs: int

    def __post_init__(self):
        idx = np.asarray(self.input_of_unit, dtype=int).ravel()
        object.__setattr__(self, "input_of_unit", idx)
        if self.num_inputs < 1:
            raise ConfigError("num_inputs must be >= 1")
        if np.any(idx < 0) or np.any(idx >= self.num_inputs):
            raise ConfigError("wiring entry out of range")

    @staticmethod
    def single(num_units: int) -> "Wiring":
        return Wiring(np.zeros(num_units, dtype=int), 1)

    @staticmethod
    def column_groups(rows: int, cols: int, num_inputs: int) -> "Wiring":
        """Adjacent columns share one DAC input (per-group feed wiring)."""
        if cols % num_inputs != 0:
            raise ConfigError("cols must divide evenly across inputs")
        per = cols // num_inputs
        col_of_unit = np.tile(np.arange(cols), rows)
        return Wiring(col_of_unit // per, num_inputs)


@dataclass(frozen=True)
class BeamPattern:
    theta: np.ndarray          # radian, 1-D grid
    phi: np.ndarray            # radian, 1-D grid
    values: np.ndarray         # (len(theta), len(phi)), nonnegative
    normalized: bool = True

    def cell_area(self) -> float:
        dt = self.theta[1] - self.theta[0] if len(self.theta) > 1 else 1.0
        dp = self.phi[1] - self.phi[0] if len(self.phi) > 1 else 1.0
        return dt * dp

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_area())

    def argmax_direction(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[i]), float(self.phi[j])


def default_grid(scene: ArrayScene, step_deg: float = 1.0):
    """theta in [0, 90] deg; phi collapses to a cut for linear scenes."""
    theta = np.deg2rad(np.arange(0.0, 90.0 + step_deg / 2, step_deg))
    if scene.rows == 1 or scene.cols == 1:
        phi = np.array([0.0])
    else:
        phi = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    return theta, phi


def steering_incident(scene: ArrayScene) -> np.ndarray:
    """Per-unit incident carrier phase vector e(r0)."""
    return np.exp(1j * scene.omega * scene.incident_delays())


def outgoing_delays(scene: ArrayScene, theta: float, phi: float) -> np.ndarray:
    a = np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )
    return scene.unit_positions() @ a / C_LIGHT


def steering_outgoing(scene: ArrayScene, theta: float, phi: float) -> np.ndarray:
    """Per-unit outgoing carrier phase vector e(k) toward (theta, phi)."""
    return np.exp(1j * scene.omega * outgoing_delays(scene, theta, phi))


def phase_vector(codebook: Codebook, unit: UnitModel) -> np.ndarray:
    """Per-unit RC phases psi_k from the codebook bits."""
    bits = codebook.bits
    return unit.phi_on * bits + unit.phi_off * (1 - bits)


def beamforming_factor(codebook: Codebook, unit: UnitModel) -> np.ndarray:
    """Diagonal of the beamforming factor, e^{j psi_k}."""
    return np.exp(1j * phase_vector(codebook, unit))


def waveform_factor(
    codebook: Codebook,
    wiring: Wiring,
    unit: UnitModel,
    cc: ControlCircuitModel,
    inputs: list[SampledSignal],
    omega: float,
) -> np.ndarray:
    """Per-unit RC magnitude traces A_k(t), shape (num_units, n_samples).

    ON units follow the magnitude map of their filtered input; OFF units
    hold the constant zero-bias magnitude alpha.
    """
    if len(inputs) != wiring.num_inputs:
        raise ConfigError(
            f"wiring expects {wiring.num_inputs} inputs, got {len(inputs)}"
        )
    rates = {s.sample_rate for s in inputs}
    if len(rates) != 1:
        raise ConfigError(f"inputs must share one sample rate, got {sorted(rates)}")
    lengths = {len(s) for s in inputs}
    if len(lengths) != 1:
        raise ConfigError("inputs must share one length")
    n = lengths.pop()

    filtered = [apply_response(cc, s, steady_state=True).samples for s in inputs]
    mag_of_input = {}
    for j, v_ab in enumerate(filtered):
        if np.any(v_ab < unit.v_forward):
            bad = int(np.argmax(v_ab < unit.v_forward))
            raise ModulationUnderflowError(
                f"input {j} drives ON units below v_forward "
                f"({unit.v_forward} V) at sample {bad}",
                bad,
            )
        mag_of_input[j] = magnitude_map_array(unit, v_ab, omega)

    A = np.full((len(codebook), n), unit.alpha)
    on = codebook.bits == 1
    for k in np.nonzero(on)[0]:
        A[k] = mag_of_input[int(wiring.input_of_unit[k])]
    return A


def beam_pattern(
    scene: ArrayScene,
    codebook: Codebook,
    grid=None,
    literal_quadratic_sum: bool = False,
) -> BeamPattern:
    """Normalized far-field power pattern over the angle grid.

    Default is the squared coherent sum over units.  The debug flag
    switches to a per-unit squared-magnitude sum (direction independent
    for unit-modulus terms; kept only for comparison).
    """
    theta, phi = grid if grid is not None else default_grid(scene)
    if len(theta) == 0 or len(phi) == 0:
        raise ConfigError("empty angle grid")
    psi = phase_vector(codebook, scene.unit)
    fixed = np.exp(1j * psi) * scene.incident_weights() * steering_incident(scene)
    pos = scene.unit_positions()

    st, ct = np.sin(theta), np.cos(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    # direction matrix (n_theta, n_phi, 3)
    ax = np.outer(st, cp)
    ay = np.outer(st, sp)
    az = np.broadcast_to(ct[:, None], ax.shape)
    delays = (
        ax[..., None] * pos[:, 0] + ay[..., None] * pos[:, 1] + az[..., None] * pos[:, 2]
    ) / C_LIGHT
    phases = np.exp(1j * scene.omega * delays)
    if literal_quadratic_sum:
        values = np.sum(np.abs(phases * fixed) ** 2, axis=-1)
    else:
        values = np.abs(phases @ fixed) ** 2
    pattern = BeamPattern(theta, phi, values, normalized=False)
    total = pattern.integral()
    if total > 0:
        pattern = BeamPattern(theta, phi, values / total, normalized=True)
    return pattern


def scattered_field(
    scene: ArrayScene,
    codebook: Codebook,
    wiring: Wiring,
    cc: ControlCircuitModel,
    inputs: list[SampledSignal],
    direction: tuple[float, float],
    range_r: float,
    incident: SampledSignal,
    A: np.ndarray | None = None,
) -> SampledSignal:
    """Complex baseband envelope received at (theta, phi, r).

    `A` may carry precomputed per-unit magnitude traces to avoid
    re-evaluating the waveform factor.
    """
    if range_r <= 0:
        raise ConfigError("range_r must be positive")
    theta, phi = direction
    if A is None:
        A = waveform_factor(codebook, wiring, scene.unit, cc, inputs, scene.omega)
    if A.shape[1] != len(incident):
        raise ConfigError("incident envelope length must match input length")
    coeff = (
        steering_outgoing(scene, theta, phi)
        * beamforming_factor(codebook, scene.unit)
        * scene.incident_weights()
        * steering_incident(scene)
    )
    env = (coeff @ A) * np.asarray(incident.samples) / range_r
    return SampledSignal(env, incident.sample_rate, incident.unit)


def design_codebook(scene: ArrayScene, theta: float, phi: float = 0.0) -> Codebook:
    """1-bit quantization of the conjugate phase steering toward a direction.

    Ties at the quantization boundary break toward bit 1.
    """
    ideal = -scene.omega * (scene.incident_delays() + outgoing_delays(scene, theta, phi))
    d_on = np.abs(_wrap(ideal - scene.unit.phi_on))
    d_off = np.abs(_wrap(ideal - scene.unit.phi_off))
    return Codebook((d_on <= d_off).astype(int))


def _wrap(angles: np.ndarray) -> np.ndarray:
    return (angles + np.pi) % (2 * np.pi) - np.pi
