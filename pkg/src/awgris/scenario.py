"""Scenario configuration loading and end-to-end simulation runs.

A scenario is a JSON document describing the scene, codebook (or target
direction), wiring, control circuit, link, literal inputs and an
optional synthesis task.  ``run_scenario`` produces a deterministic
artifact set (CSV tables, PGM spectrograms, PNG figures) plus a
manifest with content hashes.
"""

from __future__ import annotations

import copy
import json
import os

import numpy as np

from . import reporting
from .array import (
    ArrayScene,
    Codebook,
    Wiring,
    beam_pattern,
    design_codebook,
    scattered_field,
    waveform_factor,
)
from .control import circuit_from_config
from .diode import unit_from_config
from .errors import ConfigError
from .link import LinkConfig, dc_filter, received_signal
from .signal import SampledSignal, make_waveform
from .synthesis import (
    BandAssignment,
    StftPlan,
    design_multi_input,
    design_single_input,
    image_to_control,
    stft,
)

_SCENE_DEFAULTS = {
    "rows": 1,
    "cols": 16,
    "spacing_wavelengths": 0.5,
    "feed_pos_m": [0.0, 0.0, 0.5],
    "carrier_freq_hz": 5.8e9,
    "incidence": "spherical",
    "plane_direction": [0.0, 0.0, -1.0],
}

_LINK_DEFAULTS = {
    "beam_gain": 1.0,
    "mod_attenuation": 1.0,
    "noise_std": 0.0,
    "seed": 0,
    "dc_window_s": 1e-3,
}


def bundled_scenario(name: str) -> str:
    """Path of a scenario (or other data file) shipped with the package."""
    base = os.path.join(os.path.dirname(__file__), "data", "scenarios")
    filename = name if "." in name else name + ".json"
    path = os.path.join(base, filename)
    if not os.path.exists(path):
        available = sorted(os.listdir(base))
        raise ConfigError(f"no bundled scenario {name!r}; available: {available}")
    return path


def load_config(path) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    base_dir = os.path.dirname(os.path.abspath(path))
    return resolve_config(raw, base_dir)


def resolve_config(raw: dict, base_dir: str) -> dict:
    """Fill defaults and absolutize file references.

    The resolved dict is itself a valid scenario config; re-running from
    it reproduces the same artifacts.
    """
    cfg = copy.deepcopy(raw)
    scene = {**_SCENE_DEFAULTS, **cfg.get("scene", {})}
    if "spacing_m" not in scene:
        wavelength = 299792458.0 / float(scene["carrier_freq_hz"])
        scene["spacing_m"] = float(scene["spacing_wavelengths"]) * wavelength
    cfg["scene"] = scene
    cfg["unit"] = cfg.get("unit", {})
    if ("codebook" in cfg) == ("target_direction" in cfg):
        raise ConfigError("exactly one of codebook / target_direction is required")
    cfg["link"] = {**_LINK_DEFAULTS, **cfg.get("link", {})}
    cfg["control_circuit"] = cfg.get("control_circuit", {"type": "impulse"})
    cfg.setdefault("sample_rate_hz", 1e6)
    cfg.setdefault("duration_s", 0.01)
    cfg.setdefault("inputs", [])
    cfg.setdefault("wiring", {"scheme": "single"})
    cfg.setdefault("synthesis", {"task": "none"})
    cfg.setdefault("receiver", {"mode": "sum"})
    cfg.setdefault("cases", [])
    cfg.setdefault("plots", True)
    for key in ("control_circuit", "synthesis"):
        entry = cfg[key]
        for path_key in ("path", "image_pgm"):
            if path_key in entry and not os.path.isabs(entry[path_key]):
                entry[path_key] = os.path.join(base_dir, entry[path_key])
    for spec in cfg["inputs"]:
        if "path" in spec and not os.path.isabs(spec["path"]):
            spec["path"] = os.path.join(base_dir, spec["path"])
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    if cfg["sample_rate_hz"] <= 0 or cfg["duration_s"] <= 0:
        raise ConfigError("sample_rate_hz and duration_s must be positive")
    task = cfg["synthesis"].get("task", "none")
    if task not in ("none", "single", "multi", "image"):
        raise ConfigError(f"unknown synthesis task {task!r} (config field synthesis.task)")
    for key in ("path", "image_pgm"):
        for section in ("control_circuit", "synthesis"):
            p = cfg[section].get(key)
            if p and not os.path.exists(p):
                raise ConfigError(f"{section}.{key}: referenced file {p} does not exist")


def build_scene(cfg: dict) -> ArrayScene:
    scene = cfg["scene"]
    return ArrayScene(
        rows=int(scene["rows"]),
        cols=int(scene["cols"]),
        spacing=float(scene["spacing_m"]),
        feed_pos=np.asarray(scene["feed_pos_m"], dtype=float),
        carrier_freq=float(scene["carrier_freq_hz"]),
        incidence=scene["incidence"],
        plane_direction=np.asarray(scene["plane_direction"], dtype=float),
        unit=unit_from_config(cfg["unit"]),
    )


def build_codebook(cfg: dict, scene: ArrayScene) -> Codebook:
    if "codebook" in cfg:
        bits = np.asarray(cfg["codebook"], dtype=int)
        if len(bits) != scene.num_units:
            raise ConfigError(
                f"codebook length {len(bits)} != number of units {scene.num_units}"
            )
        return Codebook(bits)
    tgt = cfg["target_direction"]
    return design_codebook(
        scene,
        np.deg2rad(float(tgt["theta_deg"])),
        np.deg2rad(float(tgt.get("phi_deg", 0.0))),
    )


def build_wiring(cfg: dict, scene: ArrayScene) -> Wiring:
    w = cfg["wiring"]
    if "input_of_unit" in w:
        return Wiring(np.asarray(w["input_of_unit"], dtype=int), int(w["num_inputs"]))
    scheme = w.get("scheme", "single")
    if scheme == "single":
        return Wiring.single(scene.num_units)
    if scheme == "columns":
        return Wiring.column_groups(scene.rows, scene.cols, int(w["num_inputs"]))
    raise ConfigError(f"unknown wiring scheme {scheme!r}")


def build_link(cfg: dict, seed_override=None) -> LinkConfig:
    link = cfg["link"]
    return LinkConfig(
        beam_gain=float(link["beam_gain"]),
        mod_attenuation=float(link["mod_attenuation"]),
        noise_std=float(link["noise_std"]),
        seed=int(seed_override if seed_override is not None else link["seed"]),
        dc_window=float(link["dc_window_s"]),
    )


def _stft_plan(cfg_stft: dict, sample_rate: float) -> StftPlan:
    dft_len = int(cfg_stft.get("dft_len", 64))
    hop = int(cfg_stft.get("hop", dft_len))
    return StftPlan.hamming(dft_len, hop, sample_rate)


def _resolve_bands(bands_cfg, plan: StftPlan):
    """Bands may be explicit bin lists or {f_lo_hz, f_hi_hz} ranges.

    Frequency ranges select both positive-frequency bins and their
    conjugate mirrors so real targets stay representable.
    """
    L = plan.dft_len
    bin_hz = plan.sample_rate / L
    out = []
    for entry in bands_cfg:
        if isinstance(entry, dict):
            f_lo, f_hi = float(entry["f_lo_hz"]), float(entry["f_hi_hz"])
            bins = set()
            for l in range(L):
                f = min(l, L - l) * bin_hz
                if f_lo <= f < f_hi:
                    bins.add(l)
            out.append(tuple(sorted(bins)))
        else:
            out.append(tuple(int(b) for b in entry))
    return tuple(out)


def _design_inputs(cfg, scene, cc):
    """Run the configured synthesis task; returns list of control signals."""
    synth = cfg["synthesis"]
    task = synth.get("task", "none")
    rate = float(cfg["sample_rate_hz"])
    duration = float(cfg["duration_s"])
    omega = scene.omega
    if task == "none":
        return [
            make_waveform(spec, rate, duration) for spec in cfg["inputs"]
        ]
    if task == "single":
        target = make_waveform(synth["target"], rate, duration)
        return [design_single_input(target, scene.unit, cc, omega)]
    if task == "multi":
        if "targets" in synth:
            # sum the per-input targets into one wideband target
            parts = [make_waveform(s, rate, duration) for s in synth["targets"]]
            samples = np.sum([p.samples for p in parts], axis=0)
            target = SampledSignal(samples, rate)
        else:
            target = make_waveform(synth["target"], rate, duration)
        plan = _stft_plan(synth.get("stft", {}), rate)
        bands = BandAssignment(_resolve_bands(synth["bands"], plan))
        return design_multi_input(target, bands, plan, scene.unit, cc, omega)
    if task == "image":
        image = reporting.read_pgm(synth["image_pgm"]).astype(float)
        plan = _stft_plan(synth.get("stft", {}), rate)
        return [image_to_control(image, plan, scene.unit, cc, omega)]
    raise ConfigError(f"unknown synthesis task {task!r}")


def _simulate_received(cfg, scene, codebook, wiring, cc, inputs, link):
    A = waveform_factor(codebook, wiring, scene.unit, cc, inputs, scene.omega)
    rate = inputs[0].sample_rate
    receiver = cfg["receiver"]
    if receiver.get("mode", "sum") == "field":
        direction = receiver.get("direction_deg", [0.0, 0.0])
        env = scattered_field(
            scene,
            codebook,
            wiring,
            cc,
            inputs,
            (np.deg2rad(float(direction[0])), np.deg2rad(float(direction[1]))),
            float(receiver.get("range_m", 1.0)),
            SampledSignal(np.ones(A.shape[1]), rate),
            A=A,
        )
        y = SampledSignal(link.beam_gain * env.samples.real, rate)
        if link.noise_std > 0:
            rng = np.random.default_rng(link.seed)
            y = y.with_samples(y.samples + rng.normal(0, link.noise_std, len(y)))
        return A, y
    return A, received_signal(A, rate, codebook, link)


def run_case(cfg: dict, out_dir: str, prefix: str = "", seed_override=None) -> list:
    """Simulate one resolved configuration; returns written artifact paths."""
    scene = build_scene(cfg)
    codebook = build_codebook(cfg, scene)
    rate = float(cfg["sample_rate_hz"])
    cc = circuit_from_config(cfg["control_circuit"], rate)
    link = build_link(cfg, seed_override)
    inputs = _design_inputs(cfg, scene, cc)

    files = []

    def path(name):
        p = os.path.join(out_dir, prefix + name)
        files.append(p)
        return p

    pattern = beam_pattern(scene, codebook)
    reporting.write_pattern_csv(path("pattern.csv"), pattern)
    np.savetxt(path("codebook.csv"), codebook.bits[None], fmt="%d", delimiter=",")

    plots = bool(cfg.get("plots", True))
    if plots:
        reporting.plot_pattern(path("pattern.png"), pattern)

    if inputs:
        wiring = build_wiring(cfg, scene)
        if wiring.num_inputs != len(inputs):
            if cfg["wiring"].get("scheme") == "single" and "input_of_unit" not in cfg["wiring"]:
                wiring = Wiring.column_groups(scene.rows, scene.cols, len(inputs))
            else:
                raise ConfigError(
                    f"wiring declares {wiring.num_inputs} inputs but "
                    f"{len(inputs)} are configured"
                )
        for j, sig in enumerate(inputs):
            reporting.write_signal_csv(path(f"control_{j}.csv"), sig)
        A, y = _simulate_received(cfg, scene, codebook, wiring, cc, inputs, link)
        reporting.write_signal_csv(path("received.csv"), y)
        y_ac = dc_filter(y, link)
        reporting.write_signal_csv(path("received_ac.csv"), y_ac)
        reporting.write_spectrum_csv(path("spectrum.csv"), y_ac)
        if plots:
            reporting.plot_signal(path("received.png"), y)
            reporting.plot_spectrum(path("spectrum.png"), y_ac)
        if cfg["synthesis"].get("task") == "image":
            plan = _stft_plan(cfg["synthesis"].get("stft", {}), rate)
            S = stft(y_ac, plan)
            reporting.write_spectrogram_db_csv(path("spectrogram.csv"), S)
            db = np.roll(S.magnitude_db(-60.0), plan.dft_len // 2, axis=0)
            reporting.write_pgm(path("spectrogram.pgm"), db)
            if plots:
                reporting.plot_spectrogram(path("spectrogram.png"), S)
    else:
        # no inputs: OFF units reflect alpha, ON units idle at the
        # reference bias; either way the trace is constant plus noise
        from .diode import magnitude_map

        n = int(round(float(cfg["duration_s"]) * rate))
        a_on = magnitude_map(scene.unit, scene.unit.v_ref, scene.omega)
        levels = np.where(codebook.bits == 1, a_on, scene.unit.alpha)
        A = np.repeat(levels[:, None], n, axis=1)
        y = received_signal(A, rate, codebook, link)
        reporting.write_signal_csv(path("received.csv"), y)
        if plots:
            reporting.plot_signal(path("received.png"), y)
    return files


def run_scenario(config, out_dir: str, seed_override=None) -> dict:
    """Run a scenario (path or resolved dict); returns the manifest mapping."""
    if isinstance(config, (str, os.PathLike)):
        cfg = load_config(config)
    else:
        cfg = resolve_config(config, os.getcwd())
    os.makedirs(out_dir, exist_ok=True)

    files = []
    cases = cfg.get("cases") or [None]
    for i, case in enumerate(cases):
        if case is None:
            case_cfg, prefix = cfg, ""
        else:
            case_cfg = copy.deepcopy(cfg)
            name = case.get("name", f"case{i}")
            for key, value in case.items():
                if key != "name":
                    case_cfg[key] = value
            prefix = f"{name}_"
        files += run_case(case_cfg, out_dir, prefix, seed_override)

    resolved_path = os.path.join(out_dir, "config.resolved.json")
    echo = copy.deepcopy(cfg)
    if seed_override is not None:
        echo["link"]["seed"] = int(seed_override)
    with open(resolved_path, "w", newline="") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(resolved_path)
    manifest_path = reporting.write_manifest(out_dir, files)
    with open(manifest_path) as fh:
        return json.load(fh)
