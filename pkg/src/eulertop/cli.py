"""Command-line front end.

Subcommands: simulate, phase, holonomy, compose, heteroclinic, sweep.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .composition import AxisAngle, compose_direct, compose_penrose, heteroclinic_data, \
    near_separatrix_phase_limit, reorientation_composite
from .dynamics import STEPS_PER_TURN, BodyState, InertiaSpec, default_step, integrate, \
    momentum_from_invariants
from .errors import EulerTopError, InvalidInput, NumericalError
from .phase import PhaseReport, enclosed_area, one_period, phase_report
from .so3 import circular_distance, rotation_about, rotation_distance, spherical_polygon_area
from .transport import inertial_basis, parallel_transport

log = logging.getLogger("eulertop")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
PHASE_KEYS = list(PhaseReport.__dataclass_fields__)


# -- flag parsing --------------------------------------------------------------

def _floats(text, count=None):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"non-finite value in {text!r}")
    return vals


def vector3(text):
    return np.array(_floats(text, 3))


def float_list(text):
    return _floats(text)


def inertia_arg(text):
    try:
        return InertiaSpec(*_floats(text, 3))
    except InvalidInput as exc:
        raise argparse.ArgumentTypeError(str(exc))


def positive_float(text):
    v = _floats(text, 1)[0]
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def attitude_arg(text):
    """``axis:x,y,z,angle:r`` -> rotation matrix."""
    try:
        head, angle = text.split(",angle:")
        if not head.startswith("axis:"):
            raise ValueError
        axis = np.array(_floats(head[len("axis:"):], 3))
        angle = float(angle)
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"expected axis:x,y,z,angle:r, got {text!r}")
    norm = np.linalg.norm(axis)
    if not norm > 0:
        raise argparse.ArgumentTypeError("attitude axis must be non-zero")
    return rotation_about(axis / norm, angle)


def k_grid(text):
    lo, hi, n = _floats(text, 3)
    if n < 1 or n != int(n):
        raise argparse.ArgumentTypeError("grid size must be a positive integer")
    return list(np.linspace(lo, hi, int(n)))


@dataclass(frozen=True)
class RunConfig:
    inertia: InertiaSpec
    P0: np.ndarray
    S0: np.ndarray
    dt: Optional[float]
    max_time: Optional[float]
    out: Optional[str]


def run_config(args):
    """Resolve the momentum flags into a :class:`RunConfig` (raises InvalidInput)."""
    has_p0 = args.p0 is not None
    has_inv = args.energy is not None
    if has_p0 == has_inv:
        raise InvalidInput("give exactly one of --p0 or --p/--energy[/--family]")
    if has_p0:
        P0 = args.p0
        if not np.linalg.norm(P0) > 0:
            raise InvalidInput("--p0 must be non-zero")
    else:
        P0 = momentum_from_invariants(args.inertia, args.p, args.energy, family=args.family)
    S0 = args.attitude if args.attitude is not None else np.eye(3)
    return RunConfig(args.inertia, P0, S0, args.dt, args.max_time, getattr(args, "out", None))


# -- output helpers ------------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def write_text(text, path):
    """Write atomically to ``path`` (stdout if None); no partial file on failure."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".eulertop-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the final file ordinary umask permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj):
    return json.dumps(obj, indent=2) + "\n"


# -- commands ------------------------------------------------------------------

def cmd_simulate(args):
    cfg = run_config(args)
    p = float(np.linalg.norm(cfg.P0))
    h = cfg.dt if cfg.dt is not None else default_step(cfg.inertia, p)
    if args.steps is not None:
        n = args.steps
    elif cfg.max_time is not None:
        n = int(round(cfg.max_time / h))
    else:
        n = STEPS_PER_TURN
    traj = integrate(BodyState(cfg.P0, cfg.S0), cfg.inertia, h, n, project=args.project)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "P1", "P2", "P3", "qw", "qx", "qy", "qz"])
    for t, P, q in zip(traj.t, traj.P, traj.quat):
        w.writerow([_fmt(t), *map(_fmt, P), *map(_fmt, q)])
    write_text(buf.getvalue(), cfg.out)
    log.info("simulated %d steps of %.3g s; |P| drift %.2e, K drift %.2e",
             n, h, traj.norm_drift, traj.energy_drift)


def cmd_phase(args):
    cfg = run_config(args)
    rep = phase_report(cfg.P0, cfg.S0, cfg.inertia, h=cfg.dt, max_time=cfg.max_time)
    write_text(dump_json(rep.to_dict()), cfg.out)
    log.info("delta theta %.6f deg, residual %.2e rad", math.degrees(rep.delta_theta_measured), rep.residual)


def _read_loop(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    try:
        pts = np.array([[float(x) for x in r] for r in rows if r[0].strip() not in ("x", "P1")])
    except ValueError as exc:
        raise InvalidInput(f"bad loop file {path!r}: {exc}")
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInput("loop file needs three columns x,y,z")
    return pts


def cmd_holonomy(args):
    if args.loop is not None:
        pts = _read_loop(args.loop)
        if args.reverse:
            pts = pts[::-1]
        p = float(np.linalg.norm(pts[0]))
        n0 = pts[0] / p
        seed = np.cross(n0, np.array([0.0, 0.0, 1.0]) if abs(n0[2]) < 0.9 else np.array([1.0, 0.0, 0.0]))
        seed /= np.linalg.norm(seed)
        hol = parallel_transport(pts, seed, close=True).holonomy
        area = spherical_polygon_area(pts, p).area
    else:
        if args.inertia is None:
            raise InvalidInput("--inertia is required unless --loop is given")
        cfg = run_config(args)
        T, orbit = one_period(cfg.P0, cfg.S0, cfg.inertia, h=cfg.dt, max_time=cfg.max_time)
        if args.reverse:
            orbit = orbit.reversed()
        p = orbit.p
        e, _, _ = inertial_basis(orbit.S[0] @ orbit.P[0])
        hol = parallel_transport(orbit.P, orbit.S[0].T @ e).holonomy
        area = enclosed_area(orbit, p).area
    ratio = area / (p * p)
    out = {"holonomy": hol, "area_over_p2": ratio, "circular_distance": circular_distance(hol, ratio)}
    write_text(dump_json(out), args.out)


def _unit_arg(v, flag):
    n = np.linalg.norm(v)
    if not n > 0:
        raise InvalidInput(f"{flag} must be non-zero")
    return v / n


def cmd_compose(args):
    r1 = AxisAngle(_unit_arg(args.axis_a, "--axis-a"), args.angle_a)
    r2 = AxisAngle(_unit_arg(args.axis_b, "--axis-b"), args.angle_b)
    c = compose_penrose(r1, r2)
    d = compose_direct(r1, r2)
    out = {"construction": c.to_dict(), "direct": d.to_dict(),
           "distance": rotation_distance(c.matrix, d.matrix)}
    write_text(dump_json(out), args.out)


def cmd_heteroclinic(args):
    data = heteroclinic_data(args.inertia, args.p)
    out = data.to_dict()
    out["composite"] = reorientation_composite(args.inertia, args.p).to_dict()
    rows = []
    if args.epsilons:
        rows = near_separatrix_phase_limit(args.inertia, args.p, args.epsilons, family=args.family or "e1",
                                           max_time=args.max_time, workers=args.workers)
    out["sweep"] = [r._asdict() for r in rows]
    write_text(dump_json(out), args.out)
    log.info("lune angle %.4f deg", math.degrees(data.lune_angle))


def _sweep_point(I, p, K, dt, max_time):
    sep = I.separatrix_energy(p)
    family = "e1" if K < sep else "e3"
    P0 = momentum_from_invariants(I, p, K, family=family)
    return family, phase_report(P0, None, I, h=dt, max_time=max_time)


def cmd_sweep(args):
    energies = args.energies if args.energies is not None else args.k_grid
    if not energies:
        raise InvalidInput("give --energies or --k-grid")
    I, p = args.inertia, args.p
    energies = sorted(float(K) for K in energies)
    work = lambda K: _sweep_point(I, p, K, args.dt, args.max_time)  # noqa: E731
    if args.workers and args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(work, energies))
    else:
        results = [work(K) for K in energies]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "family", *PHASE_KEYS])
    for i, (family, rep) in enumerate(results):
        d = rep.to_dict()
        w.writerow([i, family, *(_fmt(d[k]) for k in PHASE_KEYS)])
    write_text(buf.getvalue(), args.out)


# -- parser --------------------------------------------------------------------

def _add_momentum_flags(sp, inertia_required=True):
    sp.add_argument("--inertia", type=inertia_arg, required=inertia_required, help="I1,I2,I3")
    sp.add_argument("--p0", type=vector3, help="initial body momentum x,y,z")
    sp.add_argument("--p", type=positive_float, default=1.0, help="momentum norm (with --energy)")
    sp.add_argument("--energy", type=positive_float, help="kinetic energy K")
    sp.add_argument("--family", choices=["e1", "e3"], help="axis encircled by the orbit")
    sp.add_argument("--attitude", type=attitude_arg, help="axis:x,y,z,angle:r (default identity)")
    sp.add_argument("--dt", type=positive_float, help="step size override")
    sp.add_argument("--max-time", type=positive_float, help="integration time limit")
    sp.add_argument("--out", help="output path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="eulertop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="write a CSV trajectory")
    _add_momentum_flags(sp)
    sp.add_argument("--steps", type=int, help="number of steps (overrides --max-time)")
    sp.add_argument("--project", action="store_true", help="rescale P to its initial norm each step")
    sp.set_defaults(func=cmd_simulate, json_errors=False)

    sp = sub.add_parser("phase", help="JSON phase report for one period")
    _add_momentum_flags(sp)
    sp.set_defaults(func=cmd_phase, json_errors=True)

    sp = sub.add_parser("holonomy", help="parallel-transport holonomy against enclosed area")
    _add_momentum_flags(sp, inertia_required=False)
    sp.add_argument("--loop", help="CSV file of x,y,z vertices of a closed loop")
    sp.add_argument("--reverse", action="store_true", help="traverse the loop backwards")
    sp.set_defaults(func=cmd_holonomy, json_errors=True)

    sp = sub.add_parser("compose", help="compose two rotations by the spherical construction")
    sp.add_argument("--axis-a", type=vector3, required=True)
    sp.add_argument("--angle-a", type=lambda s: _floats(s, 1)[0], required=True)
    sp.add_argument("--axis-b", type=vector3, required=True)
    sp.add_argument("--angle-b", type=lambda s: _floats(s, 1)[0], required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compose, json_errors=True)

    sp = sub.add_parser("heteroclinic", help="separatrix geometry and near-separatrix sweep")
    sp.add_argument("--inertia", type=inertia_arg, required=True)
    sp.add_argument("--p", type=positive_float, default=1.0)
    sp.add_argument("--epsilons", type=float_list)
    sp.add_argument("--family", choices=["e1", "e3"])
    sp.add_argument("--max-time", type=positive_float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_heteroclinic, json_errors=True)

    sp = sub.add_parser("sweep", help="CSV of phase reports over an energy grid")
    sp.add_argument("--inertia", type=inertia_arg, required=True)
    sp.add_argument("--p", type=positive_float, default=1.0)
    grid = sp.add_mutually_exclusive_group(required=True)
    grid.add_argument("--energies", type=float_list)
    grid.add_argument("--k-grid", type=k_grid, help="lo,hi,n")
    sp.add_argument("--dt", type=positive_float)
    sp.add_argument("--max-time", type=positive_float)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep, json_errors=False)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except EulerTopError as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INVALID
        if args.json_errors:
            sys.stdout.write(dump_json({"error": str(exc), "kind": type(exc).__name__}))
        print(f"eulertop {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
