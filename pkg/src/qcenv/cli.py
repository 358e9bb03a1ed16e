"""Command line entry point: ``qcenv <command> ...``.

Exit codes: 0 success, 1 usage error, 2 solver did not converge (outputs are
still written), 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .directions import (DirectionSet, directional_resolution, equally_spaced_2d,
                         lattice_directions)
from .export import render_svg, write_pbm, write_vtk
from .grid import GridFormatError, build, read_grid, write_grid
from .levelset import (convex_hull_oracle, diff_within_band, marching_squares,
                       mask_diff, sublevel_mask)
from .linesweep import SolveParams, solve
from .oracles import qc_violation, robust_qc_violation
from .testfns import (WORST_ANGLE_W3, ConeSpec, chebyshev_plateau, neg_dist_interval,
                      pacman_sdf, two_cones)

REPORT_SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_INVALID = 0, 1, 2, 3

log = logging.getLogger("qcenv")

PRESETS = {
    # name: (dim, default shape, default domain)
    "cones2d": (2, (64, 64), (-1.0, 1.0)),
    "cones2d-rotated": (2, (64, 64), (-1.0, 1.0)),
    "cones3d": (3, (64, 64, 64), (-1.0, 1.0)),
    "pacman": (2, (64, 64), (-1.5, 1.5)),
    "plateau": (2, (64, 64), (-1.0, 1.0)),
    "dist1d": (1, (65,), (-2.0, 2.0)),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def preset_sampler(name: str, theta=None, alpha=None, combiner="min",
                   radius=1.0, quadrant=1):
    if name == "cones2d":
        return two_cones(ConeSpec(theta or 0.0, alpha or 0.0, combiner, 2))
    if name == "cones2d-rotated":
        th = WORST_ANGLE_W3 if theta is None else theta
        return two_cones(ConeSpec(th, alpha or 0.0, combiner, 2))
    if name == "cones3d":
        a = 1 / 3 if alpha is None else alpha
        return two_cones(ConeSpec(theta or 0.0, a, combiner, 3))
    if name == "pacman":
        return pacman_sdf((0.0, 0.0), radius, quadrant)
    if name == "plateau":
        return chebyshev_plateau()
    if name == "dist1d":
        return neg_dist_interval()
    raise UsageError(f"unknown preset {name!r}")


def generate(name: str, shape=None, domain=None, **kw):
    """Grid for a named preset, with the preset's default shape and domain."""
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    dim, default_shape, default_domain = PRESETS[name]
    shape = tuple(shape or default_shape)
    if len(shape) == 1 and dim > 1:
        shape = shape * dim
    if len(shape) != dim:
        raise UsageError(f"preset {name} is {dim}D; got shape {shape}")
    domain = list(domain or default_domain)
    if len(domain) == 2:
        box = [tuple(domain)] * dim
    elif len(domain) == 2 * dim:
        box = [tuple(domain[2 * i : 2 * i + 2]) for i in range(dim)]
    else:
        raise UsageError("--domain takes 2 numbers or 2 per axis")
    return build(box, shape, preset_sampler(name, **kw))


def read_directions(path, dim) -> DirectionSet:
    vecs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vecs.append(tuple(int(t) for t in line.replace(",", " ").split()))
        except ValueError:
            raise GridFormatError(f"bad direction {line!r}", lineno) from None
    D = DirectionSet.from_vectors(vecs)
    if D.dim != dim:
        raise ValueError(f"direction file is {D.dim}D but the grid is {dim}D")
    return D


def _directions(args, dim) -> DirectionSet:
    if getattr(args, "dirs", None):
        return read_directions(args.dirs, dim)
    return lattice_directions(dim, args.width)


def _violation_json(rep):
    if rep is None:
        return None
    return {"max": rep.max_violation,
            "worst_triple": list(rep.worst_triple) if rep.worst_triple else None,
            "count_above": rep.count_above}


def _report(command, params, report=None, violation=None, files=(), extra=None):
    out = {
        "version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "params": params,
        "iterations": report.outer_iterations if report else None,
        "max_change": list(report.max_change_per_iteration) if report else [],
        "converged": report.converged if report else None,
        "violation": _violation_json(violation),
        "files": [str(f) for f in files],
    }
    if extra:
        out.update(extra)
    return out


def _emit(report_dict, path=None):
    text = json.dumps(report_dict, indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def _solve_params(args, epsilon=None):
    return SolveParams(args.tol, args.max_iters, epsilon, args.workers)


def _default_out(inp, suffix):
    p = Path(inp)
    return str(p.with_name(p.stem + suffix))


# -- commands --------------------------------------------------------------


def cmd_gen(args):
    kw = {"theta": args.theta, "alpha": args.alpha, "combiner": args.combiner,
          "radius": args.radius, "quadrant": args.quadrant}
    g = generate(args.preset, args.shape, args.domain, **kw)
    out = args.out or f"{args.preset}.grid"
    write_grid(g, out)
    files = [out]
    if args.out_vtk:
        write_vtk(g, args.out_vtk)
        files.append(args.out_vtk)
    params = {"preset": args.preset, "shape": list(g.shape),
              "box": [list(b) for b in g.box], **kw}
    _emit(_report("gen", params, files=files))
    return EXIT_OK


def _run_solver(args, command, epsilon):
    g = read_grid(args.input)
    D = _directions(args, g.dim)
    params = _solve_params(args, epsilon)
    u, report = solve(g, D, params)
    log.info("%s: %d outer iterations in %.3fs", command, report.outer_iterations,
             report.wall_time)
    out = args.out or _default_out(args.input, ".qce.grid")
    write_grid(u, out)
    files = [out]
    if args.out_vtk:
        write_vtk(u, args.out_vtk)
        files.append(args.out_vtk)
    violation = None if args.no_check else qc_violation(u, D)
    rparams = {"input": args.input, "width": None if args.dirs else args.width,
               "dirs": args.dirs, "directions": len(D), "tol": args.tol,
               "max_iters": args.max_iters, "epsilon": epsilon}
    if args.report:
        files.append(args.report)
    _emit(_report(command, rparams, report, violation, files), args.report)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_solve(args):
    return _run_solver(args, "solve", None)


def cmd_robust(args):
    if args.epsilon < 0:
        raise UsageError("--epsilon must be nonnegative")
    return _run_solver(args, "robust", args.epsilon)


def cmd_check(args):
    u = read_grid(args.input)
    D = _directions(args, u.dim)
    if args.epsilon is None:
        rep = qc_violation(u, D)
    else:
        rep = robust_qc_violation(u, D, args.epsilon)
    params = {"input": args.input, "width": args.width, "epsilon": args.epsilon}
    _emit(_report("check", params, violation=rep))
    return EXIT_OK


def cmd_dtheta(args):
    if args.equally_spaced is not None:
        d = directional_resolution(equally_spaced_2d(args.equally_spaced))
    else:
        d = directional_resolution(lattice_directions(args.dim, args.width))
    print(f"{d:.12g} rad ({math.degrees(d):.10g} deg)")
    return EXIT_OK


def cmd_hull(args):
    g = read_grid(args.input)
    if g.dim != 2:
        raise ValueError("hull needs a 2D grid")
    D = _directions(args, 2)
    u, report = solve(g, D, _solve_params(args))
    mask = sublevel_mask(u, args.alpha)
    source = sublevel_mask(g, args.alpha)
    out = args.out or _default_out(args.input, ".qce.grid")
    mask_out = args.mask_out or _default_out(args.input, ".hull.pbm")
    write_grid(u, out)
    write_pbm(mask, mask_out)
    files = [out, mask_out]
    extra = {"hull": {"cells": mask.count, "source_cells": source.count}}
    if source.count:
        oracle = convex_hull_oracle(source)
        count, frac = mask_diff(mask, oracle)
        extra["hull"].update(
            oracle_cells=oracle.count, diff_count=count, diff_fraction=frac,
            within_band=diff_within_band(mask, oracle, args.band))
        if args.oracle_out:
            write_pbm(oracle, args.oracle_out)
            files.append(args.oracle_out)
    rparams = {"input": args.input, "alpha": args.alpha, "width": args.width,
               "tol": args.tol, "max_iters": args.max_iters, "band": args.band}
    if args.report:
        files.append(args.report)
    _emit(_report("hull", rparams, report, None, files, extra), args.report)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def default_levels(u, n=8):
    lo, hi = float(u.values.min()), float(u.values.max())
    return np.linspace(lo, hi, n + 2)[1:-1].tolist()


def cmd_render(args):
    u = read_grid(args.input)
    if u.dim != 2:
        raise ValueError("render needs a 2D grid")
    if args.levels is None:
        levels = default_levels(u)
    elif len(args.levels) == 1 and float(args.levels[0]).is_integer() and args.count:
        levels = default_levels(u, int(args.levels[0]))
    else:
        levels = [float(x) for x in args.levels]
    cs = marching_squares(u, levels)
    overlay = None
    if args.overlay:
        v = read_grid(args.overlay)
        if v.shape != u.shape:
            raise ValueError("overlay grid has a different shape")
        overlay = marching_squares(v, levels)
    out = args.out or _default_out(args.input, ".svg")
    render_svg(u.box, cs, out, overlay)
    _emit(_report("render", {"input": args.input, "overlay": args.overlay,
                             "levels": levels}, files=[out]))
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _solver_flags(p, with_out=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--width", "-W", type=int, default=3, help="lattice width (default 3)")
    g.add_argument("--dirs", help="file with one integer direction per line")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    if with_out:
        p.add_argument("--out", "-o")
        p.add_argument("--report", help="also write the JSON report here")


def build_parser():
    parser = _Parser(prog="qcenv", description="Quasiconvex envelopes on grids.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="sample a preset function")
    p.add_argument("preset", choices=sorted(PRESETS))
    p.add_argument("--shape", type=int, nargs="+")
    p.add_argument("--domain", type=float, nargs="+")
    p.add_argument("--theta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--combiner", choices=["min", "max"], default="min")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--quadrant", type=int, default=1, choices=[1, 2, 3, 4])
    p.add_argument("--out", "-o")
    p.add_argument("--out-vtk")
    p.set_defaults(func=cmd_gen)

    for name, func, hlp in (("solve", cmd_solve, "quasiconvex envelope"),
                            ("robust", cmd_robust, "epsilon-robust envelope")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("input")
        if name == "robust":
            p.add_argument("--epsilon", "-e", type=float, required=True)
        _solver_flags(p)
        p.add_argument("--out-vtk")
        p.add_argument("--no-check", action="store_true",
                       help="skip the violation scan of the output")
        p.set_defaults(func=func)

    p = sub.add_parser("check", help="measure quasiconvexity violations")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--width", "-W", type=int, default=3)
    g.add_argument("--dirs")
    p.add_argument("--epsilon", "-e", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dtheta", help="directional resolution of a direction set")
    p.add_argument("--dim", type=int, default=2, choices=[2, 3])
    g = p.add_mutually_exclusive_group()
    g.add_argument("--width", "-W", type=int, default=3)
    g.add_argument("--equally-spaced", type=int, metavar="K")
    p.set_defaults(func=cmd_dtheta)

    p = sub.add_parser("hull", help="convex hull of a sublevel set")
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--band", type=int, default=2)
    p.add_argument("--mask-out")
    p.add_argument("--oracle-out")
    _solver_flags(p)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("render", help="SVG contour plot")
    p.add_argument("input")
    p.add_argument("--levels", nargs="+", help="explicit levels (or N with --count)")
    p.add_argument("--count", action="store_true",
                   help="treat a single --levels value as a number of levels")
    p.add_argument("--overlay", help="second grid drawn dashed")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"qcenv: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GridFormatError, ValueError, OSError) as e:
        print(f"qcenv: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
