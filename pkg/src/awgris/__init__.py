"""Simulation and inverse design for analog-waveform 1-bit reflective surfaces."""

from .array import (
    ArrayScene,
    BeamPattern,
    Codebook,
    Wiring,
    beam_pattern,
    beamforming_factor,
    design_codebook,
    scattered_field,
    steering_incident,
    steering_outgoing,
    waveform_factor,
)
from .control import (
    ControlCircuitModel,
    apply_response,
    flatness_metric,
    identity_circuit,
    inverse_filter,
    rlc_lowpass_circuit,
)
from .diode import (
    DiodeModel,
    UnitModel,
    default_unit,
    inverse_magnitude_map,
    magnitude_map,
    magnitude_range,
    pin_impedance,
    rc_state,
    reflection_coefficient,
)
from .link import LinkConfig, dc_filter, modulation_efficiency, received_signal
from .scenario import bundled_scenario, run_scenario
from .signal import SampledSignal
from .synthesis import (
    BandAssignment,
    Spectrogram,
    StftPlan,
    band_mask,
    design_multi_input,
    design_single_input,
    dft_matrix,
    hamming_window,
    hankelize,
    image_to_control,
    istft,
    stft,
)

__version__ = "0.1.0"
