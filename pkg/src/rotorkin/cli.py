"""Command-line front end.

Subcommands: kinematics, reconstruct, surface, ellipse, verify.  A JSON
config file supplies the same fields as the flags; flags win.  Exit codes:
0 success, 1 tolerance failure, 2 config error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

from . import ellipse as ell
from . import reconstruct, surface, verify
from .curves import curve_from_spec, make_catalog_curve
from .errors import BadParameters, KinematicsError, UnknownCurve
from .plane import distance_kinematics, local_limits
from .space import space_distance_kinematics
from .surface import chart_curve, surface_from_spec
from .vec import Vec2

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorkin",
        description="rotating-frame kinematics of parametric curves")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    k = sub.add_parser("kinematics", help="sample frame kinematics to CSV/JSON")
    common(k)
    k.add_argument("--curve", help="catalog curve name")
    k.add_argument("--a", type=float, help="ellipse semi-major axis")
    k.add_argument("--b", type=float, help="ellipse semi-minor axis")
    k.add_argument("--radius", type=float, help="circle/helix radius")
    k.add_argument("--pitch", type=float, help="helix pitch")
    k.add_argument("--frame", default=None,
                   help="origin | focus | point:ax,ay | local")
    k.add_argument("--samples", type=int, default=None)

    r = sub.add_parser("reconstruct", help="rebuild a trajectory from motion data")
    common(r)
    r.add_argument("--preset", help="|".join(sorted(reconstruct.PRESETS)))
    r.add_argument("--step", type=float, default=None)

    s = sub.add_parser("surface", help="kinematics of a chart curve on a surface")
    common(s)
    s.add_argument("--surface", dest="surface_kind",
                   help="sphere | torus | cylinder | plane | graph")
    s.add_argument("--samples", type=int, default=None)

    e = sub.add_parser("ellipse", help="export the focal distance profile")
    common(e)
    e.add_argument("--a", type=float, default=None)
    e.add_argument("--b", type=float, default=None)
    e.add_argument("--samples", type=int, default=None)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("--filter", default=None, help="run only criteria with this tag")
    v.add_argument("--inject-fault", default=None,
                   help=argparse.SUPPRESS)  # test hook
    return parser


def _load_config(args) -> dict:
    config = {}
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        if not isinstance(config, dict):
            raise ConfigError("config root must be a JSON object")
    return config


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _emit(headers, rows, out_path: Optional[str], fmt: str) -> None:
    if fmt == "json":
        payload = [dict(zip(headers, (float(c) for c in row))) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(headers)]
        lines.extend(",".join(_fmt(c) for c in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_curve(args, config):
    record = config.get("curve")
    name = getattr(args, "curve", None)
    if name:
        params = {}
        for key in ("a", "b", "radius", "pitch"):
            value = getattr(args, key, None)
            if value is not None:
                params[key] = value
        return make_catalog_curve(name, params)
    if record:
        return curve_from_spec(record)
    raise ConfigError("no curve given (use --curve or config curve record)")


def _parse_frame(spec: str):
    if spec in ("origin", "local", "focus"):
        return spec, None
    if spec.startswith("point:"):
        try:
            ax, ay = (float(p) for p in spec[len("point:"):].split(","))
        except ValueError:
            raise ConfigError(f"bad frame spec {spec!r}")
        return "point", Vec2(ax, ay)
    raise ConfigError(f"bad frame spec {spec!r}")


def cmd_kinematics(args) -> int:
    config = _load_config(args)
    curve = _resolve_curve(args, config)
    frame_spec = args.frame or config.get("frame", "origin")
    samples = args.samples or config.get("samples", 100)
    fmt = args.format or config.get("format", "csv")
    out = args.out or config.get("out")
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    frame, point = _parse_frame(frame_spec)

    if frame == "focus":
        if curve.name != "ellipse":
            raise ConfigError("focus frame is only valid for the ellipse")
        spec_params = (config.get("curve") or {}).get("params", {})
        a = args.a if args.a is not None else spec_params.get("a", 2.0)
        b = args.b if args.b is not None else spec_params.get("b", 1.0)
        point = Vec2(math.sqrt(a * a - b * b), 0.0)
        frame = "point"
    if curve.dim == 3 and frame != "origin":
        raise ConfigError("space curves support only the origin frame")
    if frame == "local" and curve.dim != 2:
        raise ConfigError("the local frame sampler applies to plane curves")

    t0, t1 = curve.domain
    ts = [t0 + (t1 - t0) * i / (samples - 1) for i in range(samples)]
    rows = []
    try:
        if curve.dim == 3:
            headers = ["t", "D", "dD", "d2D", "speed_A", "speed_B", "speed_C"]
            for t in ts:
                kin = space_distance_kinematics(curve, t)
                rows.append((t, kin.D, kin.dD, kin.d2D,
                             kin.speed_a, kin.speed_b, kin.speed_c))
        elif frame == "local":
            headers = ["t", "D", "dD", "d2D", "rot_speed", "phi", "psi_speed"]
            for t in ts:
                lim = local_limits(curve, t)
                # chord-limit values: D -> 0, dD -> phi, d2D -> phi'
                rows.append((t, 0.0, lim.phi, lim.phi_prime, lim.psi_speed,
                             lim.phi, lim.psi_speed))
        else:
            center = point if point is not None else Vec2(0.0, 0.0)
            headers = ["t", "D", "dD", "d2D", "rot_speed"]
            for t in ts:
                kin = distance_kinematics(curve, center, t)
                rows.append((t, kin.D, kin.dD, kin.d2D, kin.rot_speed))
    except KinematicsError as exc:
        print(f"{type(exc).__name__} at t={t:g}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(headers, rows, out, fmt)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    config = _load_config(args)
    preset_name = args.preset or config.get("preset")
    step = args.step if args.step is not None else config.get("step")
    out = args.out or config.get("out")
    domain = config.get("domain")
    try:
        if preset_name:
            trajectory, max_error, tolerance = reconstruct.run_preset(
                preset_name, step=step,
                domain=tuple(domain) if domain else None)
        else:
            record = config.get("curve")
            if not record:
                raise ConfigError("reconstruct needs --preset or a curve record")
            curve = curve_from_spec(record)
            if curve.dim == 2:
                problem = reconstruct.plane_data_from_curve(curve, step=step)
                trajectory = reconstruct.reconstruct_plane(problem)
            else:
                problem = reconstruct.space_data_from_curve(curve, step=step)
                trajectory = reconstruct.reconstruct_space(problem)
            max_error, tolerance = trajectory.max_error_vs(curve), 1e-5
    except (ConfigError, BadParameters, UnknownCurve):
        raise  # configuration problems, not numerical ones
    except KinematicsError as exc:
        print(f"{type(exc).__name__}: {exc} (step={step})", file=sys.stderr)
        return EXIT_NUMERIC
    if out:
        trajectory.write_csv(out)
    print(f"max_error={max_error:.17g}")
    return EXIT_OK if max_error < tolerance else EXIT_TOLERANCE


def cmd_surface(args) -> int:
    config = _load_config(args)
    record = config.get("surface")
    if args.surface_kind:
        record = {"kind": args.surface_kind,
                  "params": (record or {}).get("params")}
    if not record:
        raise ConfigError("surface command needs --surface or a surface record")
    surf = surface_from_spec(record)

    cc = config.get("chart_curve")
    if not cc or "u" not in cc or "v" not in cc or "domain" not in cc:
        raise ConfigError(
            "surface command needs a chart_curve record {u, v, domain}")
    from . import expr as expr_mod
    chains = {}
    for axis in ("u", "v"):
        ast = expr_mod.parse(cc[axis])
        chain = [ast]
        for _ in range(3):
            chain.append(expr_mod.differentiate(chain[-1]))
        chains[axis] = chain

    def make(axis, order):
        node = chains[axis][order]
        return lambda t: expr_mod.evaluate(node, t)

    curve = chart_curve(
        make("u", 0), make("v", 0), domain=tuple(cc["domain"]),
        u_derivs=(make("u", 1), make("u", 2), make("u", 3)),
        v_derivs=(make("v", 1), make("v", 2), make("v", 3)))

    samples = args.samples or config.get("samples", 100)
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    fmt = args.format or config.get("format", "csv")
    t0, t1 = curve.domain
    ts = [t0 + (t1 - t0) * i / (samples - 1) for i in range(samples)]
    headers = ["t", "D", "dD", "d2D", "speed_A", "speed_B", "speed_C"]
    rows = []
    try:
        for t in ts:
            kin = surface.surface_distance_kinematics(surf, curve, t)
            rows.append((t, kin.D, kin.dD, kin.d2D,
                         kin.speed_a, kin.speed_b, kin.speed_c))
    except KinematicsError as exc:
        print(f"{type(exc).__name__} at t={t:g}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(headers, rows, args.out or config.get("out"), fmt)
    return EXIT_OK


def cmd_ellipse(args) -> int:
    config = _load_config(args)
    a = args.a if args.a is not None else config.get("a", 2.0)
    b = args.b if args.b is not None else config.get("b", 1.0)
    samples = args.samples or config.get("samples", 100)
    out = args.out or config.get("out")
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    params = ell.EllipseParams(a, b)
    text = ell.profile_csv_text(params, samples)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all(filter_tag=args.filter,
                             fault=getattr(args, "inject_fault", None))
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_TOLERANCE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "kinematics": cmd_kinematics,
        "reconstruct": cmd_reconstruct,
        "surface": cmd_surface,
        "ellipse": cmd_ellipse,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, KinematicsError) as exc:
        # bad parameters and malformed records are configuration errors
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
