"""Command-line front end: sweeps and trajectories exported as CSV + JSON.

Angles in file headers are degrees and parasitic translations millimeters
(matching the usual plot axes); everything internal is radians and meters.
Output files are written atomically and reruns with identical inputs produce
byte-identical CSV bodies.
"""

import argparse
import datetime
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .config import DEG, load_config
from .errors import Prs3Error
from .sweep import integrate_trajectory, make_grid, parasitic_map, stiffness_surfaces

ENV_CONFIG = "PRS3_CONFIG"
ORIENTATION_CHART = "R = Rx(theta_x) Ry(theta_y) Rz(torsion)"

PARASITIC_HEADER = "theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,torsion_deg,converged"
STIFFNESS_HEADER = ("theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,"
                    "kpx,kpy,kpz,kax,kay,kaz")
TRAJECTORY_HEADER = "t,theta_x_deg,theta_y_deg,x_par_mm,y_par_mm,torsion_deg,residual_m"

STIFFNESS_UNITS = {
    "theta_x_deg": "deg", "theta_y_deg": "deg",
    "x_par_mm": "mm", "y_par_mm": "mm",
    "kpx": "N/m", "kpy": "N/m", "kpz": "N/m",
    "kax": "N*m/rad", "kay": "N*m/rad", "kaz": "N*m/rad",
}


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    return "%.12g" % value


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(path, args, config, outputs, extra=None):
    manifest = {
        "tool": "prs3",
        "version": __version__,
        "command": args.command,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "orientation_chart": ORIENTATION_CHART,
        "reference_point": "platform center",
        "config": config.to_dict(),
        "parameters": {k: v for k, v in vars(args).items()
                       if k not in ("command", "func")},
        "outputs": [os.path.abspath(p) for p in outputs],
    }
    if extra:
        manifest.update(extra)
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_config(args):
    path = args.config or os.environ.get(ENV_CONFIG) or None
    return load_config(path, overrides=args.set)


def _summarize(samples, columns, getters):
    """Argmax/argmin node of each data column, for the run summary."""
    summary = {}
    ok = [s for s in samples if s.converged]
    if not ok:
        return summary
    for col, get in zip(columns, getters):
        vals = [get(s) for s in ok]
        hi = max(range(len(vals)), key=vals.__getitem__)
        lo = min(range(len(vals)), key=vals.__getitem__)
        summary[col] = {
            "max": {"value": vals[hi], "theta_x_deg": ok[hi].theta_x / DEG,
                    "theta_y_deg": ok[hi].theta_y / DEG},
            "min": {"value": vals[lo], "theta_x_deg": ok[lo].theta_x / DEG,
                    "theta_y_deg": ok[lo].theta_y / DEG},
        }
    return summary


def cmd_parasitic(args):
    config = _load_config(args)
    grid = make_grid(args.grid, config, args.z)
    samples = parasitic_map(grid, config, threads=args.threads)
    lines = [PARASITIC_HEADER]
    for s in samples:
        lines.append(",".join([
            _fmt(s.theta_x / DEG), _fmt(s.theta_y / DEG),
            _fmt(s.x_par * 1e3), _fmt(s.y_par * 1e3),
            _fmt(s.torsion / DEG), _fmt(s.converged)]))
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "parasitic.csv")
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    summary = _summarize(samples,
                         ["x_par_mm", "y_par_mm", "torsion_deg"],
                         [lambda s: s.x_par * 1e3, lambda s: s.y_par * 1e3,
                          lambda s: s.torsion / DEG])
    manifest_path = os.path.join(args.out, "parasitic.manifest.json")
    _write_manifest(manifest_path, args, config, [csv_path], {"summary": summary})
    failed = sum(1 for s in samples if not s.converged)
    print("wrote %s (%d nodes, %d failed)" % (csv_path, len(samples), failed))
    if failed:
        for s in samples:
            if not s.converged:
                print("  failed node: theta_x=%.3f deg theta_y=%.3f deg"
                      % (s.theta_x / DEG, s.theta_y / DEG), file=sys.stderr)
        return 1
    return 0


def cmd_stiffness(args):
    config = _load_config(args)
    grid = make_grid(args.grid, config, args.z)
    samples = stiffness_surfaces(grid, config, threads=args.threads)
    lines = [STIFFNESS_HEADER]
    for s in samples:
        if not s.converged:
            continue
        lines.append(",".join([
            _fmt(s.theta_x / DEG), _fmt(s.theta_y / DEG),
            _fmt(s.x_par * 1e3), _fmt(s.y_par * 1e3),
            _fmt(s.kpx), _fmt(s.kpy), _fmt(s.kpz),
            _fmt(s.kax), _fmt(s.kay), _fmt(s.kaz)]))
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "stiffness.csv")
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    cols = ["kpx", "kpy", "kpz", "kax", "kay", "kaz"]
    summary = _summarize(samples, cols, [lambda s, c=c: getattr(s, c) for c in cols])
    manifest_path = os.path.join(args.out, "stiffness.manifest.json")
    _write_manifest(manifest_path, args, config, [csv_path],
                    {"summary": summary, "units": STIFFNESS_UNITS,
                     "space": args.space})
    failed = sum(1 for s in samples if not s.converged)
    print("wrote %s (%d nodes, %d failed)" % (csv_path, len(samples), failed))
    for col in cols:
        if col in summary:
            print("  %s: max %.6g at (%.1f, %.1f) deg, min %.6g at (%.1f, %.1f) deg"
                  % (col,
                     summary[col]["max"]["value"], summary[col]["max"]["theta_x_deg"],
                     summary[col]["max"]["theta_y_deg"],
                     summary[col]["min"]["value"], summary[col]["min"]["theta_x_deg"],
                     summary[col]["min"]["theta_y_deg"]))
    return 1 if failed else 0


def _build_tilt_path(shape, amplitude, duration):
    if shape == "ramp":
        def path(t):
            frac = min(max(t / duration, 0.0), 1.0)
            # smoothstep keeps the commanded rates C1-continuous
            s = frac * frac * (3.0 - 2.0 * frac)
            return amplitude * s, 0.0
    elif shape == "circle":
        def path(t):
            # smooth closed loop through the home orientation
            ang = 2.0 * math.pi * t / duration
            return amplitude * math.sin(ang), amplitude * (1.0 - math.cos(ang))
    else:
        raise Prs3Error("unknown trajectory shape %r" % (shape,))
    return path


def cmd_trajectory(args):
    config = _load_config(args)
    amplitude = args.amplitude_deg * DEG
    path = _build_tilt_path(args.shape, amplitude, args.duration)
    result = integrate_trajectory(path, args.z, args.step, args.duration, config)
    lines = [TRAJECTORY_HEADER]
    for i, t in enumerate(result.times):
        tx, ty = result.tilt[i]
        x, y, phi = result.states[i]
        lines.append(",".join([
            _fmt(t), _fmt(tx / DEG), _fmt(ty / DEG),
            _fmt(x * 1e3), _fmt(y * 1e3), _fmt(phi / DEG),
            _fmt(result.residuals[i])]))
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "trajectory.csv")
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    manifest_path = os.path.join(args.out, "trajectory.manifest.json")
    _write_manifest(manifest_path, args, config, [csv_path],
                    {"integrator": {"method": result.method, "step": result.step}})
    print("wrote %s (%d samples, max residual %.3e m)"
          % (csv_path, len(result.times), float(np.max(result.residuals))))
    return 0


def _add_common(parser):
    parser.add_argument("--config", default=None,
                        help="YAML config path (default: $%s)" % ENV_CONFIG)
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (dotted paths allowed)")
    parser.add_argument("--z", type=float, default=0.39,
                        help="platform heave in meters (default 0.39)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=["csv", "json"], default="csv",
                        help="primary output format (json adds no extra files; "
                             "the manifest sidecar is always JSON)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid sweeps")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prs3",
        description="Parasitic-motion and stiffness maps of a 3-PRS manipulator")
    parser.add_argument("--version", action="version", version="prs3 " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parasitic", help="sweep the parasitic translations/torsion")
    _add_common(p)
    p.add_argument("--grid", type=int, default=41, help="odd samples per axis")
    p.set_defaults(func=cmd_parasitic)

    p = sub.add_parser("stiffness", help="sweep the six diagonal stiffness surfaces")
    _add_common(p)
    p.add_argument("--grid", type=int, default=41, help="odd samples per axis")
    p.add_argument("--space", choices=["orientation", "parasitic", "both"],
                   default="both",
                   help="coordinate system(s) of interest; the CSV always "
                        "carries both, this is recorded in the manifest")
    p.set_defaults(func=cmd_stiffness)

    p = sub.add_parser("trajectory", help="integrate a commanded tilt path")
    _add_common(p)
    p.add_argument("--shape", choices=["ramp", "circle"], default="ramp")
    p.add_argument("--amplitude-deg", type=float, default=30.0)
    p.add_argument("--duration", type=float, default=1.0, help="seconds")
    p.add_argument("--step", type=float, default=1e-3, help="RK4 step, seconds")
    p.set_defaults(func=cmd_trajectory)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Prs3Error as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
