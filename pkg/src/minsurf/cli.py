"""Command-line interface: surface generation, family animation and the
verification suite.

Exit codes: 0 success, 1 verification check failure, 2 invalid input,
3 I/O failure.  MINSURF_THREADS caps the parallelism used for frame
generation; outputs are bit-identical for any setting.

Options may also be supplied through a JSON file (``--config``); explicit
flags win over file values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import meshio, verify
from .errors import InvalidInputError
from .families import FamilySpec, family_frames
from .weierstrass import DomainGrid, integrate_representation, parse_surface_spec

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_IO = 3


def _parse_grid(text):
    try:
        a, _, b = text.lower().partition("x")
        n, m = int(a), int(b)
    except ValueError as exc:
        raise InvalidInputError(f"grid must look like 128x128, got {text!r}") from exc
    if n < 5 or m < 5:
        raise InvalidInputError("grid needs at least 5 samples per axis")
    return n, m


def _threads():
    raw = os.environ.get("MINSURF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInputError(f"MINSURF_THREADS must be an integer, got {raw!r}")


def _merge_config(args, parser):
    """Overlay config-file values under explicit command-line flags."""
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"config file is not valid JSON: {exc}") from exc
    defaults = {action.dest: action.default for action in parser._actions
                if action.dest not in ("help", "func", "subparser")}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in defaults:
            raise InvalidInputError(f"unknown config key {key!r}")
        if getattr(args, dest) == defaults[dest]:
            setattr(args, dest, value)
    return args


def _build_grid(datum, args):
    n_rho, n_phi = _parse_grid(args.grid)
    rmax = float(args.rmax)
    if args.rmin is None:
        rmin = 0.05 * rmax
    else:
        rmin = float(args.rmin)
        if rmin <= 0.0 and datum.singular_at_zero:
            raise InvalidInputError(
                f"{datum.label} is singular at w = 0; rmin must be positive")
    if rmin <= 0.0:
        rmin = rmax / n_rho  # open disk: skip the chart singularity at 0
    return DomainGrid.polar(rmin, rmax, n_rho, n_phi)


def cmd_gen(args):
    datum = parse_surface_spec(args.surface)
    grid = _build_grid(datum, args)
    surface = integrate_representation(datum, grid)
    mesh = meshio.mesh_from_surface(surface)
    meshio.write_obj(mesh, args.out)
    if args.ply:
        meshio.write_ply(mesh, args.ply)
    print(f"wrote {args.out}: {len(mesh.vertices)} vertices, "
          f"{len(mesh.faces)} faces ({datum.label})")
    return EXIT_OK


def _family_spec(args):
    kwargs = {"kind": args.family, "t0": float(args.t0), "t1": float(args.t1),
              "frames": int(args.frames)}
    if args.family in ("bonnet", "general"):
        kwargs["base"] = parse_surface_spec(args.base)
    if args.family == "bonnet":
        kwargs["theta_max"] = float(args.theta_max)
    if args.family == "catenoid-helicoid":
        kwargs["c"] = float(args.c)
    if args.family == "general":
        from .weierstrass import compile_expression

        if not args.harmonic_pair:
            raise InvalidInputError(
                "--family general needs --harmonic-pair '<phi-expr>;<theta-expr>'")
        phi_expr, sep, theta_expr = args.harmonic_pair.partition(";")
        if not sep:
            raise InvalidInputError(
                "--harmonic-pair needs '<phi-expr>;<theta-expr>'")
        kwargs["harmonic_pair"] = (compile_expression(phi_expr),
                                   compile_expression(theta_expr))
    return FamilySpec(**kwargs)


def cmd_animate(args):
    from .families import family_member

    spec = _family_spec(args)
    # rmin defaults depend on whether members are singular at w = 0
    worst_member = family_member(spec, spec.t0)
    if not worst_member.singular_at_zero:
        worst_member = family_member(spec, spec.t1)
    grid = _build_grid(worst_member, args)

    start = time.perf_counter()
    frames = family_frames(spec, grid, threads=_threads())
    os.makedirs(args.outdir, exist_ok=True)
    records = []
    for frame in frames:
        name = f"frame_{frame.index:04d}.obj"
        mesh = meshio.mesh_from_surface(frame.surface)
        meshio.write_obj(mesh, os.path.join(args.outdir, name))
        records.append({"index": frame.index, "t": frame.t,
                        "scale": frame.scale, "file": name})
    manifest = {
        "family": spec.kind,
        "t0": spec.t0, "t1": spec.t1, "frames": records,
        "grid": args.grid, "rmin": grid.s[0], "rmax": grid.s[-1],
        "timings": {"total_s": time.perf_counter() - start},
    }
    with open(os.path.join(args.outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(records)} frames to {args.outdir}")
    return EXIT_OK


REFINEMENT_CHECKS = ["03-weierstrass-identities", "05-gauss-curvature",
                     "07-bending-neutral-association", "11-circulation"]


def cmd_verify(args):
    checks = None
    if args.check:
        checks = [c.strip() for c in args.check.split(",") if c.strip()]
    if args.grid_refinement:
        checks = REFINEMENT_CHECKS if checks is None else checks
    start = time.perf_counter()
    report = verify.run_suite(checks)
    elapsed = time.perf_counter() - start
    with open(args.out, "w") as fh:
        fh.write(verify.report_to_json(report))
    for rec in report["checks"]:
        status = "PASS" if rec["passed"] else "FAIL"
        print(f"{status} {rec['check_id']}: max residual {rec['max_residual']:.3e} "
              f"(tolerance {rec['tolerance']:.3e}, grid {rec['grid']})")
    summary = report["summary"]
    print(f"{summary['passed']}/{summary['total']} checks passed "
          f"in {elapsed:.1f}s; report: {args.out}")
    return EXIT_OK if summary["all_passed"] else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="minsurf",
        description="Minimal surfaces from holomorphic data: generation, "
                    "families and verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate one surface mesh (OBJ)")
    gen.add_argument("--surface", required=False,
                     help="catalog spec, e.g. enneper, bour:m=3, "
                          "scherk2:theta=0.785, custom:<Phi>;<chi>")
    gen.add_argument("--grid", default="64x64")
    gen.add_argument("--rmin", default=None, type=float)
    gen.add_argument("--rmax", default=1.5, type=float)
    gen.add_argument("--out", default="surface.obj")
    gen.add_argument("--ply", default=None,
                     help="optional sidecar PLY with attribute channels")
    gen.add_argument("--config", default=None)
    gen.set_defaults(func=cmd_gen, subparser=gen)

    ani = sub.add_parser("animate", help="export family frames + manifest")
    ani.add_argument("--family", required=False,
                     choices=["bour-t", "catenoid-helicoid", "bonnet", "general"])
    ani.add_argument("--base", default="enneper")
    ani.add_argument("--frames", default=60, type=int)
    ani.add_argument("--t0", default=0.0, type=float)
    ani.add_argument("--t1", default=1.0, type=float)
    ani.add_argument("--theta-max", default=np.pi / 2, type=float)
    ani.add_argument("--c", default=1.0, type=float)
    ani.add_argument("--harmonic-pair", default=None,
                     help="for --family general: '<phi-expr>;<theta-expr>'")
    ani.add_argument("--grid", default="64x64")
    ani.add_argument("--rmin", default=None, type=float)
    ani.add_argument("--rmax", default=1.5, type=float)
    ani.add_argument("--outdir", default="frames")
    ani.add_argument("--config", default=None)
    ani.set_defaults(func=cmd_animate, subparser=ani)

    ver = sub.add_parser("verify", help="run the verification suite")
    ver.add_argument("--check", default=None,
                     help="comma-separated check ids (default: all)")
    ver.add_argument("--grid-refinement", action="store_true",
                     help="run only the grid-refinement convergence checks")
    ver.add_argument("--out", default="verification_report.json")
    ver.add_argument("--config", default=None)
    ver.set_defaults(func=cmd_verify, subparser=ver)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args, args.subparser)
        if args.command == "gen" and not args.surface:
            raise InvalidInputError("gen needs --surface (or a config file entry)")
        if args.command == "animate" and not args.family:
            raise InvalidInputError("animate needs --family (or a config file entry)")
        return args.func(args)
    except (InvalidInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
