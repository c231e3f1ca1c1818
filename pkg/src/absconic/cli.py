"""Command line front end.

Exit codes: 0 success (for `verify`: truth matched), 1 verify mismatch,
2 parse/usage errors, 3 precondition failures, 4 algorithmic pipeline errors.
All numeric inputs must be exact rationals ("3", "-7/2") or Gaussian
rationals ("1/2+3i"); decimals are rejected.
"""

import argparse
import json
import os
import re
import sys
import time

import sympy as sp

from . import scene
from .calibrate import (CalibrationError, calibrate_revolution,
                        calibrate_squares, calibrate_torus, find_symmetry)
from .mpoly import MPoly
from .projective import Conic, ProjPoint, elliptic_distance
from .scalars import ScalarError, rat, scalar_to_obj

EXIT_PARSE, EXIT_PRECOND, EXIT_PIPELINE = 2, 3, 4

_GAUSS_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*(?P<im>[+-]\s*\d+(?:/\d+)?\s*\*?\s*i|[+-]?\s*i)?\s*$")


def parse_gauss(text):
    """Exact Gaussian rational from strings like '3', '-7/2', 'i', '1/2-3i'."""
    t = text.strip().replace(" ", "")
    if re.search(r"\d\.\d|\.\d|\d\.", t):
        raise ScalarError("decimal input %r rejected: use an exact rational like 7/2" % text)
    # the lookahead keeps a numeric prefix out of the real part when it is
    # actually the coefficient of i ('5/3i' is (5/3)i, not 5/3 + i)
    m = re.match(r"^(?P<re>[+-]?\d+(?:/\d+)?(?![\d/]*i))?(?P<im>[+-]?(?:\d+(?:/\d+)?)?i)?$", t)
    if not m or (m.group("re") is None and m.group("im") is None) or m.group(0) != t:
        raise ScalarError("cannot parse %r as a Gaussian rational" % text)
    re_part = rat(m.group("re")) if m.group("re") else sp.Integer(0)
    im_txt = m.group("im")
    if im_txt is None:
        return re_part
    im_txt = im_txt[:-1]
    if im_txt in ("", "+"):
        im = sp.Integer(1)
    elif im_txt == "-":
        im = sp.Integer(-1)
    else:
        im = rat(im_txt)
    return re_part + im * sp.I


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_manifest(outdir, command, args, inputs, outputs, t0):
    manifest = {
        "command": command,
        "arguments": args,
        "inputs": inputs,
        "outputs": outputs,
        "precision_bits": int(os.environ.get("ABSCONIC_PRECISION", "128")),
        "elapsed_seconds": round(time.time() - t0, 3),
    }
    _dump_json(manifest, os.path.join(outdir, "manifest.json"))


def _parse_pose(text):
    """'p,q,r;tx,ty,tz' -> rational rigid pose matrix."""
    try:
        rot_s, tr_s = text.split(";")
        cayley = [rat(v) for v in rot_s.split(",")]
        trans = [rat(v) for v in tr_s.split(",")]
        if len(cayley) != 3 or len(trans) != 3:
            raise ValueError
    except (ValueError, ScalarError) as exc:
        raise ScalarError("pose must be 'p,q,r;tx,ty,tz' with exact rationals: %s" % exc)
    return scene.rigid_pose(cayley, trans)


def _parse_camera(text):
    if text == "canonical":
        return scene.canonical_camera()
    vals = [rat(v) for v in text.split(",")]
    if len(vals) != 12:
        raise ScalarError("camera must be 'canonical' or 12 comma-separated rationals")
    return scene.CameraSpec(sp.Matrix(3, 4, vals))


def _parse_point(text):
    coords = [parse_gauss(v) for v in text.split(",")]
    if len(coords) != 3:
        raise ScalarError("point must have 3 comma-separated coordinates")
    return ProjPoint(coords)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(args):
    t0 = time.time()
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    if args.kind == "torus":
        pose = _parse_pose(args.pose) if args.pose else None
        cam = _parse_camera(args.camera) if args.camera else None
        spec = scene.TorusSpec(args.a, args.b, pose)
        bundle = scene.synth_torus_scene(spec, cam)
        path = os.path.join(outdir, "bundle.json")
        _dump_json(bundle.to_obj(), path)
        _write_manifest(outdir, "synth torus",
                        {"a": args.a, "b": args.b, "pose": args.pose,
                         "camera": args.camera}, [], [path], t0)
        print("wrote %s (picture degree %d)" % (path, bundle.picture.total_degree()))
    else:
        if args.plane != "z=1":
            raise ScalarError("only --plane z=1 is supported")
        pose = _parse_pose(args.pose) if args.pose else sp.eye(4)
        cam = _parse_camera(args.camera) if args.camera else None
        pts = scene.square_scene(pose, args.side or "1", cam)
        path = os.path.join(outdir, "square.json")
        _dump_json({"points": [p.to_obj() for p in pts]}, path)
        _write_manifest(outdir, "synth square",
                        {"pose": args.pose, "side": args.side}, [], [path], t0)
        print("wrote %s" % path)
    return 0


def cmd_symfind(args):
    F = MPoly.from_obj(_load_json(args.input))
    s = find_symmetry(F)
    obj = s.map.to_obj()
    if args.out:
        _dump_json(obj, args.out)
    print("reflection matrix (det 1):")
    print(sp.pretty(sp.Matrix(s.map.mat)))
    return 0


def _load_bundle_or_parts(args):
    if args.bundle:
        b = scene.SceneBundle.from_obj(_load_json(args.bundle))
        return b.picture, b.dual_picture, b
    if not args.dual:
        raise ScalarError("either --bundle or --dual is required")
    pic = MPoly.from_obj(_load_json(args.picture)) if args.picture else None
    dual = MPoly.from_obj(_load_json(args.dual))
    return pic, dual, None


def cmd_calibrate(args):
    t0 = time.time()
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    if args.pipeline == "torus":
        pic, dual, _b = _load_bundle_or_parts(args)
        node = _parse_point(args.node) if args.node else None
        cs = calibrate_torus(pic, dual, node=node)
        obj = {
            "reflection": cs.reflection.map.to_obj(),
            "node_pairs": [[p.to_obj() for p in pair] for pair in cs.node_pairs],
            "notes": cs.notes,
            "candidates": [{
                "ce_dual": c["ce_dual"].to_obj(),
                "ce": c["ce"].to_obj(),
                "exact": c["exact"],
                "diagnostics": {k: str(v) for k, v in c["diagnostics"].items()},
            } for c in cs.candidates],
        }
        path = os.path.join(outdir, "candidates.json")
        _dump_json(obj, path)
        print("%d candidate(s); %d note(s)" % (len(cs.candidates), len(cs.notes)))
        for c in cs.candidates:
            print("  C_E* =", c["ce_dual"].mat.tolist(), "diagnostics:", c["diagnostics"])
        for n in cs.notes:
            print("  note:", n)
    elif args.pipeline == "squares":
        data = _load_json(args.input)
        squares = [[ProjPoint.from_obj(p) for p in quad] for quad in data["squares"]]
        C = calibrate_squares(squares)
        path = os.path.join(outdir, "conic.json")
        _dump_json(C.to_obj(), path)
        print("C_E =", C.mat.tolist())
    else:
        curves = [MPoly.from_obj(_load_json(p)) for p in args.inputs]
        C = calibrate_revolution(curves)
        path = os.path.join(outdir, "conic.json")
        _dump_json(C.to_obj(), path)
        print("C_E =", C.mat.tolist())
    _write_manifest(outdir, "calibrate " + args.pipeline, vars_safe(args), [], [path], t0)
    return 0


def vars_safe(args):
    return {k: v for k, v in vars(args).items() if isinstance(v, (str, int, type(None)))}


def cmd_verify(args):
    cands = _load_json(args.candidates)
    truth = Conic.from_obj(_load_json(args.truth))
    entries = cands["candidates"] if isinstance(cands, dict) and "candidates" in cands else cands
    key = "ce_dual" if truth.plane == "dual" else "ce"
    for entry in entries:
        C = Conic.from_obj(entry[key] if isinstance(entry, dict) and key in entry else entry)
        if C == truth:
            print("match: ground truth present in the candidate set")
            return 0
    print("no match: ground truth absent (%d candidates checked)" % len(entries))
    return 1


def cmd_distance(args):
    C = Conic.from_obj(_load_json(args.conic))
    p = _parse_point(args.p)
    q = _parse_point(args.q)
    d = elliptic_distance(p, q, C, prec_bits=args.precision)
    import mpmath
    print(mpmath.nstr(d, 30))
    return 0


def cmd_plot(args):
    F = MPoly.from_obj(_load_json(args.input))
    svg = plot_curve_svg(F, window=tuple(rat(v) for v in args.window.split(",")),
                         resolution=args.resolution)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print("wrote %s" % args.out)
    return 0


# ---------------------------------------------------------------------------
# marching-squares SVG plot
# ---------------------------------------------------------------------------

def plot_curve_svg(F: MPoly, window=(-2, 2, -2, 2), resolution=200, size=500):
    """Sign-change contour of the affine curve F(x, y, 1) = 0 as SVG paths."""
    from .scalars import gauss_parts
    for c in F.terms.values():
        if gauss_parts(c)[1] != 0:
            raise ValueError("plotting requires a real curve")
    syms = sp.symbols(" ".join(F.vars))
    expr = F.as_expr().subs(syms[2], 1)
    f = sp.lambdify(syms[:2], expr, "math")
    x0, x1, y0, y1 = [float(v) for v in window]
    n = int(resolution)
    xs = [x0 + (x1 - x0) * i / n for i in range(n + 1)]
    ys = [y0 + (y1 - y0) * j / n for j in range(n + 1)]
    vals = [[f(x, y) for y in ys] for x in xs]

    def to_px(x, y):
        return ((x - x0) / (x1 - x0) * size, size - (y - y0) / (y1 - y0) * size)

    def interp(xa, ya, va, xb, yb, vb):
        t = va / (va - vb)
        return (xa + t * (xb - xa), ya + t * (yb - ya))

    segments = []
    for i in range(n):
        for j in range(n):
            corners = [(xs[i], ys[j], vals[i][j]), (xs[i + 1], ys[j], vals[i + 1][j]),
                       (xs[i + 1], ys[j + 1], vals[i + 1][j + 1]),
                       (xs[i], ys[j + 1], vals[i][j + 1])]
            crossings = []
            for k in range(4):
                a, b = corners[k], corners[(k + 1) % 4]
                if (a[2] > 0) != (b[2] > 0):
                    crossings.append(interp(*a, *b))
            for k in range(0, len(crossings) - 1, 2):
                segments.append((crossings[k], crossings[k + 1]))
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
             'viewBox="0 0 %d %d">' % (size, size, size, size),
             '<rect width="100%" height="100%" fill="white"/>']
    if not segments:
        parts.append('<text x="10" y="20" font-size="14">empty real locus</text>')
        sys.stderr.write("warning: curve has no real points in the window\n")
    for (pa, pb) in segments:
        ax, ay = to_px(*pa)
        bx, by = to_px(*pb)
        parts.append('<line x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" '
                     'stroke="black" stroke-width="1"/>' % (ax, ay, bx, by))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="absconic",
                                 description="exact absolute-conic calibration toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a scene")
    ps = p.add_subparsers(dest="kind", required=True)
    pt = ps.add_parser("torus")
    pt.add_argument("--a", required=True)
    pt.add_argument("--b", required=True)
    pt.add_argument("--pose", help="'p,q,r;tx,ty,tz' Cayley rotation + translation")
    pt.add_argument("--camera", help="'canonical' or 12 rationals")
    pt.add_argument("--out")
    pt.set_defaults(func=cmd_synth)
    pq = ps.add_parser("square")
    pq.add_argument("--plane", default="z=1")
    pq.add_argument("--side")
    pq.add_argument("--pose")
    pq.add_argument("--camera")
    pq.add_argument("--out")
    pq.set_defaults(func=cmd_synth)

    p = sub.add_parser("symfind", help="unique projective reflection of a curve")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_symfind)

    p = sub.add_parser("calibrate", help="run a calibration pipeline")
    pc = p.add_subparsers(dest="pipeline", required=True)
    ct = pc.add_parser("torus")
    ct.add_argument("--bundle")
    ct.add_argument("--picture")
    ct.add_argument("--dual", help="dual picture form (required unless --bundle)")
    ct.add_argument("--node", help="non-real node 'x,y,z' (Gaussian rationals)")
    ct.add_argument("--out")
    ct.set_defaults(func=cmd_calibrate)
    csq = pc.add_parser("squares")
    csq.add_argument("--in", dest="input", required=True,
                     help='JSON {"squares": [[4 points] x3]}')
    csq.add_argument("--out")
    csq.set_defaults(func=cmd_calibrate)
    cr = pc.add_parser("revolution")
    cr.add_argument("--in", dest="inputs", nargs=3, required=True)
    cr.add_argument("--out")
    cr.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("verify", help="check a candidate set against ground truth")
    p.add_argument("--candidates", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distance", help="elliptic distance between two points")
    p.add_argument("--conic", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--precision", type=int, default=None)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("plot", help="SVG contour plot of a curve")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--window", default="-2,2,-2,2")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None):
    if "--precision" in (argv or sys.argv[1:]):
        idx = (argv or sys.argv[1:]).index("--precision")
        try:
            os.environ["ABSCONIC_PRECISION"] = str(int((argv or sys.argv[1:])[idx + 1]))
        except (IndexError, ValueError):
            pass
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ScalarError, json.JSONDecodeError, FileNotFoundError, KeyError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except CalibrationError as exc:
        print("calibration error: %s" % exc, file=sys.stderr)
        return EXIT_PIPELINE
    except ValueError as exc:
        print("precondition error: %s" % exc, file=sys.stderr)
        return EXIT_PRECOND


if __name__ == "__main__":
    sys.exit(main())
