"""Command-line front end.

Subcommands cover unit characterization, beam patterns, forward
simulation and the three synthesis paths.  Every artifact-producing
command writes CSV tables (and PNG figures) into --out and finishes
with a manifest of content hashes.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

from . import reporting
from .array import beam_pattern
from .diode import rc_state
from .errors import AwgrisError
from .scenario import build_codebook, build_scene, load_config, run_scenario
from .signal import SampledSignal


def _add_common(parser):
    parser.add_argument("--config", required=True, help="scenario config (JSON)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override link noise seed")


def _finish(out_dir, files):
    manifest = reporting.write_manifest(out_dir, files)
    print(f"wrote {len(files)} artifacts to {out_dir} (manifest: {manifest})")


def cmd_unit_rc(args):
    """Bias sweep of the unit RC: |Gamma| and phase vs voltage."""
    cfg = load_config(args.config)
    scene = build_scene(cfg)
    unit = scene.unit
    os.makedirs(args.out, exist_ok=True)
    volts = np.linspace(0.0, unit.v_ref, int(args.points))
    mags, phases = [], []
    for v in volts:
        m, p = rc_state(unit, v, scene.omega)
        mags.append(m)
        phases.append(p)
    path = os.path.join(args.out, "unit_rc.csv")
    reporting.write_csv(
        path, ["v_ab_volt", "magnitude", "phase_rad"], [volts, mags, phases]
    )
    _finish(args.out, [path])


def cmd_beam_pattern(args):
    cfg = load_config(args.config)
    scene = build_scene(cfg)
    codebook = build_codebook(cfg, scene)
    os.makedirs(args.out, exist_ok=True)
    pattern = beam_pattern(scene, codebook)
    files = [os.path.join(args.out, "pattern.csv")]
    reporting.write_pattern_csv(files[0], pattern)
    if cfg.get("plots", True):
        files.append(os.path.join(args.out, "pattern.png"))
        reporting.plot_pattern(files[-1], pattern)
    theta, phi = pattern.argmax_direction()
    print(f"main lobe at theta={np.rad2deg(theta):.1f} deg, phi={np.rad2deg(phi):.1f} deg")
    _finish(args.out, files)


def _run(args, task=None):
    if task is None:
        manifest = run_scenario(args.config, args.out, seed_override=args.seed)
    else:
        cfg = load_config(args.config)
        cfg = copy.deepcopy(cfg)
        if cfg["synthesis"].get("task", "none") != task:
            raise AwgrisError(
                f"config declares synthesis task "
                f"{cfg['synthesis'].get('task', 'none')!r}, expected {task!r}"
            )
        manifest = run_scenario(cfg, args.out, seed_override=args.seed)
    print(json.dumps(manifest, indent=2, sort_keys=True))


def cmd_simulate(args):
    _run(args)


def cmd_synth_single(args):
    _run(args, task="single")


def cmd_synth_multi(args):
    _run(args, task="multi")


def cmd_synth_image(args):
    _run(args, task="image")


def cmd_spectrum(args):
    sig = reporting.read_signal_csv(args.signal)
    os.makedirs(args.out, exist_ok=True)
    files = [os.path.join(args.out, "spectrum.csv")]
    reporting.write_spectrum_csv(files[0], sig)
    reporting.plot_spectrum(os.path.join(args.out, "spectrum.png"), sig)
    files.append(os.path.join(args.out, "spectrum.png"))
    _finish(args.out, files)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awgris",
        description="Forward simulation and inverse waveform design for "
        "analog-controlled 1-bit reflective surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("unit-rc", help="bias sweep of the unit reflection coefficient")
    _add_common(p)
    p.add_argument("--points", type=int, default=241, help="sweep point count")
    p.set_defaults(func=cmd_unit_rc)

    p = sub.add_parser("beam-pattern", help="far-field pattern for the configured codebook")
    _add_common(p)
    p.set_defaults(func=cmd_beam_pattern)

    p = sub.add_parser("simulate", help="run a full scenario (forward simulation)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth-single", help="single-input waveform synthesis scenario")
    _add_common(p)
    p.set_defaults(func=cmd_synth_single)

    p = sub.add_parser("synth-multi", help="multi-input band-split synthesis scenario")
    _add_common(p)
    p.set_defaults(func=cmd_synth_multi)

    p = sub.add_parser("synth-image", help="spectrogram-image synthesis scenario")
    _add_common(p)
    p.set_defaults(func=cmd_synth_image)

    p = sub.add_parser("spectrum", help="FFT magnitude of a CSV signal")
    p.add_argument("--signal", required=True, help="input CSV (time_s, value)")
    p.add_argument("--config", required=False, help="unused; accepted for uniformity")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="unused; accepted for uniformity")
    p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        args.func(args)
    except AwgrisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
