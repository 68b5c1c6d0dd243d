"""Command line front end.

Exit codes: 0 success, 1 invalid input, 2 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import demos
from .complexes import delaunay_from_points, parse, random_points, serialize, validate
from .errors import (EmptySelection, NonConvergence, ParseError, StarpatchError)
from .motif import ALL_NEIGHBORS_KEPT, ANY_TWO_KEPT
from .patch import OFFSET, SCALE
from .pipeline import run_pipeline
from .render import CIRCLES, MOTIF, PATCH, ROSETTE_LABELS, Scene, StyleConfig, emit_svg

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NONCONVERGENCE = 2


def _add_input_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="infile", metavar="FILE",
                     help="complex JSON document")
    src.add_argument("--demo", choices=sorted(demos.DEMOS),
                     help="built-in demo complex")
    src.add_argument("--random", type=int, metavar="N",
                     help="Delaunay triangulation of N seeded random points")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for --random point generation")


def _add_param_args(p):
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--theta", type=float, default=2.0 * math.pi / 5.0)
    p.add_argument("--tau-mode", choices=[SCALE, OFFSET], default=SCALE)
    p.add_argument("--trim-depth", type=int, default=None,
                   help="boundary layers to drop (default 1, demos may override)")
    p.add_argument("--optimize-tau", action="store_true",
                   help="sweep tau and use the best value")
    p.add_argument("--alpha", type=float, default=None,
                   help="override the star inner-circle ratio")
    p.add_argument("--filler-rule", choices=[ALL_NEIGHBORS_KEPT, ANY_TWO_KEPT],
                   default=ALL_NEIGHBORS_KEPT)
    p.add_argument("--keep", type=int, nargs="*", default=None,
                   help="explicit circle ids to keep (overrides the trim)")
    p.add_argument("--stamp", type=int, nargs=2, default=(1, 1),
                   metavar=("NA", "NB"),
                   help="torus stamping block half-counts")


def _add_style_args(p):
    p.add_argument("--layers", nargs="+", default=[MOTIF],
                   choices=[CIRCLES, PATCH, MOTIF, ROSETTE_LABELS])
    p.add_argument("--stroke-width", type=float, default=0.03)
    p.add_argument("--margin", type=float, default=0.5)
    p.add_argument("--background", default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="starpatch",
                                 description="star pattern synthesis from "
                                             "circle packings")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a complex document")
    _add_input_args(p)

    for name, helptext in (("pack", "solve and lay out the circle packing"),
                           ("patch", "emit the polygon patch"),
                           ("design", "emit the motif design"),
                           ("render", "emit SVG")):
        p = sub.add_parser(name, help=helptext)
        _add_input_args(p)
        _add_param_args(p)
        if name == "render":
            _add_style_args(p)
        p.add_argument("--out", metavar="FILE", help="output path (default stdout)")

    p = sub.add_parser("pipeline", help="run every stage and write artifacts")
    _add_input_args(p)
    _add_param_args(p)
    _add_style_args(p)
    p.add_argument("--out-dir", default=".", metavar="DIR")

    p = sub.add_parser("serve", help="run the HTTP design service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    return ap


def _load_complex(args):
    if args.infile:
        data = Path(args.infile).read_bytes()
        return parse(data), None
    if args.demo:
        return demos.demo(args.demo), demos.DEMO_DEFAULTS.get(args.demo, {})
    pts = random_points(args.random, seed=args.seed)
    return delaunay_from_points(pts), None


def _effective_trim(args, overrides):
    if args.trim_depth is not None:
        return args.trim_depth
    if overrides and "trim_depth" in overrides:
        return overrides["trim_depth"]
    return 1


def _emit(data: bytes, out):
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def _json_bytes(doc):
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _run(args):
    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK

    cx, overrides = _load_complex(args)

    if args.command == "validate":
        report = validate(cx)
        if report.ok():
            print("ok")
            return EXIT_OK
        for v in report:
            print(f"violation[{v.code}]: {v.message}", file=sys.stderr)
        return EXIT_INVALID

    result = run_pipeline(
        cx, tau=args.tau, theta=args.theta,
        trim_depth=_effective_trim(args, overrides),
        tau_mode=args.tau_mode, optimize=args.optimize_tau,
        alpha_override=args.alpha, filler_rule=args.filler_rule,
        keep=frozenset(args.keep) if args.keep is not None else None,
        stamp=tuple(args.stamp))

    if args.command == "pack":
        _emit(_json_bytes(result.packing.to_json_dict()), args.out)
    elif args.command == "patch":
        _emit(_json_bytes(result.patch.to_json_dict()), args.out)
    elif args.command == "design":
        _emit(_json_bytes(result.design.to_json_dict()), args.out)
    elif args.command == "render":
        style = StyleConfig(stroke_width=args.stroke_width,
                            layers=frozenset(args.layers),
                            margin=args.margin, background=args.background)
        _emit(result.svg(style), args.out)
    elif args.command == "pipeline":
        outdir = Path(args.out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "complex.json").write_bytes(serialize(result.complex))
        (outdir / "packing.json").write_bytes(_json_bytes(result.packing.to_json_dict()))
        (outdir / "patch.json").write_bytes(_json_bytes(result.patch.to_json_dict()))
        (outdir / "design.json").write_bytes(_json_bytes(result.design.to_json_dict()))
        style = StyleConfig(stroke_width=args.stroke_width,
                            layers=frozenset(args.layers),
                            margin=args.margin, background=args.background)
        (outdir / "design.svg").write_bytes(result.svg(style))
        if result.tau_curve is not None:
            curve = {"taus": [t for t, _ in result.tau_curve],
                     "errors": [None if math.isinf(e) else e
                                for _, e in result.tau_curve],
                     "best": result.tau}
            (outdir / "tau_curve.json").write_bytes(_json_bytes(curve))
        print(f"wrote artifacts to {outdir}", file=sys.stderr)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (EmptySelection, StarpatchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
