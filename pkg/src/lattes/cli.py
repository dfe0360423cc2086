"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
parse errors.

    lattes verify --suite dynamics --samples 100 --seed 42 --json
    lattes green --map power --point "2,1,1"
    lattes boundary --map f1 --slice "z=(s,t,1)" --res 256 --out slice
    lattes orbit --map g
    lattes groups situation5
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import __version__
from . import green as gr
from . import groups as grp
from . import orbits
from .errors import LattesError
from .maps import builtin_map
from .verify import SUITES, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAP_CHOICES = ("f1", "f2", "f3", "g", "power")

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?:(?P<re>{_REAL})(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i"
                      rf"|(?P<re_only>{_REAL})|(?P<im_only>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i)$")


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"re+imi"`` with optional signs, e.g. ``2``, ``-1.5i``, ``0.5-2i``, ``i``."""
    s = text.strip().replace(" ", "")
    m = _COMPLEX.match(s)
    if not m or not s:
        raise UsageError(f"cannot parse complex number {text!r}")

    def coef(v: str) -> float:
        return float(v + "1") if v in ("", "+", "-") else float(v)

    if m.group("re_only") is not None:
        return complex(float(m.group("re_only")), 0.0)
    if m.group("im_only") is not None:
        return complex(0.0, coef(m.group("im_only")))
    return complex(float(m.group("re")), coef(m.group("im")))


def parse_point(text: str, dim: int = 3) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != dim:
        raise UsageError(f"expected {dim} comma-separated components, got {len(parts)}")
    return np.array([parse_complex(p) for p in parts])


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; expected all or one of {', '.join(SUITES)}")
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be positive")
    if not args.tol_scale > 0:
        raise UsageError("--tol-scale must be positive")
    cfg = RunConfig(samples=args.samples, seed=args.seed, tol_scale=args.tol_scale, tol=args.tol)
    report = run_suite(args.suite, cfg, timing=args.timing)
    print(_dump(report.to_json()) if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_green(args) -> int:
    z = parse_point(args.point)
    if not np.any(z):
        raise UsageError("the Green function is undefined at the origin")
    F = builtin_map(args.map)
    res = gr.green(F, z, gr.GreenParams(degree=F.degree, p_max=args.p_max))
    if args.json:
        print(_dump({"map": args.map, "point": [[v.real, v.imag] for v in z],
                     "value": res.value, "iterations": res.iterations_used, "cauchy_gap": res.cauchy_gap}))
    else:
        print(f"G = {res.value:.15g}")
        print(f"iterations = {res.iterations_used}")
        print(f"cauchy gap = {res.cauchy_gap:.3e}")
    return EXIT_OK


def cmd_boundary(args) -> int:
    if not 1 <= args.res <= gr.MAX_RESOLUTION:
        raise UsageError(f"--res must be in [1, {gr.MAX_RESOLUTION}]")
    try:
        plane = gr.SliceSpec(args.slice, args.extent)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.calibrated:
        if args.map not in ("f1", "f2", "f3"):
            raise UsageError("--calibrated applies to f1, f2, f3 only")
        F = gr.calibrated_map(int(args.map[1]))
    else:
        F = builtin_map(args.map)
    grid = gr.boundary_slice_grid(F, plane, args.res, gr.GreenParams(degree=F.degree, p_max=args.p_max))
    written = []
    csv_path = args.csv or (args.out + ".csv" if args.out else None)
    ppm_path = args.ppm or (args.out + ".ppm" if args.out else None)
    if csv_path:
        gr.write_csv(grid, csv_path)
        written.append(csv_path)
    if ppm_path:
        gr.write_ppm(grid, ppm_path)
        written.append(ppm_path)
    summary = {"map": args.map, "slice": args.slice, "extent": args.extent, **grid.summary(), "files": written}
    if args.json:
        print(_dump(summary))
    else:
        print(f"{args.map} on {args.slice} [-{args.extent}, {args.extent}]^2 at {args.res}x{args.res}")
        print(f"G range [{summary['min']}, {summary['max']}], zero-crossing cells {summary['zero_crossing_cells']}, "
              f"degenerate cells {summary['degenerate_cells']}")
        for p in written:
            print(f"wrote {p}")
    return EXIT_OK


def cmd_orbit(args) -> int:
    F = builtin_map(args.map)
    if args.map == "power":
        raise UsageError("the power map has no critical lines to follow")
    graph = orbits.post_critical_graph(F, args.max_depth)
    out = graph.to_json()
    if args.report:
        out["lattes_report"] = orbits.lattes_obstruction_report(F, args.max_depth).to_json()
    if args.json:
        print(_dump(out))
    else:
        print(graph.to_text())
        if args.report:
            for k, v in out["lattes_report"].items():
                print(f"{k}: {v}")
    if graph.error:
        print(graph.error, file=sys.stderr)
    return EXIT_OK


GROUPS = {
    "g212": lambda: grp.gmp2(2, 1),
    "g312": lambda: grp.gmp2(3, 1),
    "g412": lambda: grp.gmp2(4, 1),
    "g422": lambda: grp.gmp2(4, 2),
    "g612": lambda: grp.gmp2(6, 1),
    "s3": grp.s3_rep,
    "situation5": grp.situation5_group,
}


def cmd_groups(args) -> int:
    if args.name == "registry":
        entries = grp.registry_report()
        print(_dump(entries) if args.json else "\n".join(
            f"{e['label']}: tau={complex(*e['tau']):.4g} group={e['group']} order={e['order']} "
            f"branch locus: {e['branch_locus']}" for e in entries))
        return EXIT_OK
    if args.name not in GROUPS:
        raise UsageError(f"unknown group {args.name!r}; expected registry or one of {', '.join(GROUPS)}")
    G = GROUPS[args.name]()
    info = {
        "name": args.name,
        "order": len(G),
        "reflections": len(grp.reflections(G)),
        "linear_parts": len(G.linear_parts()),
        "translation_classes": G.translation_classes(),
        "registry": [e.to_dict(with_order=False) for e in grp.classification_registry()
                     if e.group_name == G.name or (args.name == "situation5" and e.label == 5)],
    }
    if args.json:
        print(_dump(info))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lattes", description="Numerical checks for Lattès maps of P^2.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", default="all", help=f"all or one of: {', '.join(SUITES)}")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-scale", type=float, default=1.0)
    v.add_argument("--tol", type=float, default=None, help="replace every tolerance")
    v.add_argument("--timing", action="store_true", help="include wall time in the report")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("green", help="evaluate the Green function at a point")
    g.add_argument("--map", choices=MAP_CHOICES, default="power")
    g.add_argument("--point", required=True, help='e.g. "2,1+0.5i,-i"')
    g.add_argument("--p-max", type=int, default=40)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_green)

    b = sub.add_parser("boundary", help="Green values on an affine slice, exported as CSV/PPM")
    b.add_argument("--map", choices=MAP_CHOICES, default="f1")
    b.add_argument("--slice", default="z=(s,t,1)")
    b.add_argument("--extent", type=float, default=2.0)
    b.add_argument("--res", type=int, default=128)
    b.add_argument("--p-max", type=int, default=40)
    b.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the grid is deterministic")
    b.add_argument("--calibrated", action="store_true", help="use the theta-calibrated lift of f_i")
    b.add_argument("--out", help="path prefix; writes PREFIX.csv and PREFIX.ppm")
    b.add_argument("--csv")
    b.add_argument("--ppm")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_boundary)

    o = sub.add_parser("orbit", help="post-critical line graph")
    o.add_argument("--map", choices=MAP_CHOICES, default="g")
    o.add_argument("--max-depth", type=int, default=8)
    o.add_argument("--report", action="store_true", help="append the Lattès obstruction report")
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_orbit)

    gr_ = sub.add_parser("groups", help="group orders, reflections and registry data")
    gr_.add_argument("name", help=f"registry or one of: {', '.join(GROUPS)}")
    gr_.add_argument("--json", action="store_true")
    gr_.set_defaults(func=cmd_groups)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LattesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
