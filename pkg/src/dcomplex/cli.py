"""Command line interface.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
errors (bad flags, out-of-range parameters, unreadable documents).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import document as docmod
from . import integrability as integ
from . import tilings
from .graph import check_rhombic_embeddable
from .labeling import (Realization, integrability_defect, labeling_from_realization, lift_to_zd,
                       sector_decomposition, sector_of, weights_from_labeling)
from .linear import (QuadratureConfig, check_cauchy_riemann, discrete_exponential, integral_reconstruct,
                     laplacian_apply, random_holomorphic, box_to_mapping)
from .svg import LAYERS, render_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _load_doc(args) -> docmod.TilingDocument:
    if args.input:
        try:
            return docmod.load(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from exc
        except docmod.DocumentError as exc:
            raise UsageError(f"{args.input}: {exc}") from exc
    t = tilings.generate(args.tiling, size=None, radius=args.radius, seed=args.seed)
    return docmod.TilingDocument.from_tiling(t)


def _setup(doc):
    d = doc.quadgraph()
    alpha = labeling_from_realization(d, Realization(d.positions))
    base = doc.base if doc.base is not None else min(d.black)
    return d, alpha, base


def _emit(args, report: dict, doc=None, layer=None, payload=None) -> None:
    if args.format == "svg":
        if doc is None:
            raise UsageError("this command has no SVG output")
        text = render_svg(doc, layer, payload)
    else:
        text = json.dumps(report, sort_keys=True, indent=1, allow_nan=False) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vertex_map(vals: dict, real: bool = False) -> dict:
    if real:
        return {str(k): float(np.real(v)) for k, v in sorted(vals.items())}
    return {str(k): [complex(v).real, complex(v).imag] for k, v in sorted(vals.items())}


def _status(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- commands

def cmd_generate(args):
    size = tuple(args.size) if args.size else None
    if size is not None and len(size) == 1:
        size = size[0]
    t = tilings.generate(args.kind, size=size, radius=args.radius, seed=args.seed)
    doc = docmod.TilingDocument.from_tiling(t)
    if args.format == "svg":
        _emit(args, {}, doc, "tiling")
    else:
        text = docmod.dumps(doc)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args):
    doc = _load_doc(args)
    d, alpha, _ = _setup(doc)
    emb = check_rhombic_embeddable(d)
    defect = integrability_defect(weights_from_labeling(d, alpha), d)
    ok = bool(emb) and defect <= args.tolerance
    report = {"embeddable": bool(emb), "reason": emb.reason, "strips": list(emb.strips),
              "faces": list(emb.faces), "integrability_defect": defect, "pass": ok}
    _emit(args, report)
    return _status(ok)


def cmd_exp(args):
    doc = _load_doc(args)
    d, alpha, base = _setup(doc)
    P = lift_to_zd(d, alpha, doc.slopes, base)
    try:
        vals = {v: discrete_exponential(P[v], args.z, doc.slopes) for v in d.vertices}
    except ZeroDivisionError as exc:
        raise UsageError(str(exc)) from exc
    scale = max(1.0, max(abs(v) for v in vals.values()))
    res = check_cauchy_riemann(vals, d, d.positions) / scale
    ok = res <= args.tolerance
    doc.functions["exp"] = vals
    _emit(args, {"z": [args.z.real, args.z.imag], "cr_residual": res, "values": _vertex_map(vals), "pass": ok},
          doc, "heatmap", "exp")
    return _status(ok)


def cmd_reconstruct(args):
    rng = np.random.default_rng(args.seed)
    s = _slopes_for(args.tiling)
    shape = (args.depth + 1,) * s.d
    errs = []
    for _ in range(args.trials):
        box = random_holomorphic(shape, s, rng)
        errs.append(integral_reconstruct(box_to_mapping(box), s, QuadratureConfig()).error)
    worst = float(max(errs)) if errs else 0.0
    ok = worst <= args.tolerance
    _emit(args, {"trials": args.trials, "depth": args.depth, "max_error": worst, "pass": ok})
    return _status(ok)


def _slopes_for(kind: str):
    from .labeling import SlopeData

    alphas = {"square": tilings.SQUARE_SLOPES, "dual-kagome": tilings.KAGOME_SLOPES,
              "penrose": tilings.PENROSE_SLOPES}[kind]
    return SlopeData.from_labels(alphas)


def _within_depth(P, v, depth):
    return depth is None or max(abs(x) for x in P[v]) <= depth


def cmd_green(args):
    from .special import greens_function

    doc = _load_doc(args)
    d, alpha, base = _setup(doc)
    G = greens_function(d, doc.slopes, base, alpha)
    nu = weights_from_labeling(d, alpha)
    lap = laplacian_apply(G, nu, d, "black")
    P = lift_to_zd(d, alpha, doc.slopes, base)
    defect = max(abs(lap[v] - (1.0 if v == base else 0.0)) for v in lap)
    ok = defect <= args.tolerance
    vals = {v: G[v] for v in G if _within_depth(P, v, args.depth)}
    doc.functions["green"] = vals
    _emit(args, {"base": base, "laplacian_defect": defect, "values": _vertex_map(vals, real=True), "pass": ok},
          doc, "heatmap", "green")
    return _status(ok)


def _face_cr(f, face, pos) -> float:
    x0, y0, x1, y1 = face
    return abs((f[x1] - f[x0]) / (pos[x1] - pos[x0]) - (f[y1] - f[y0]) / (pos[y1] - pos[y0]))


def cmd_log(args):
    from .special import log_on_quadgraph

    doc = _load_doc(args)
    d, alpha, base = _setup(doc)
    vals, sheets = log_on_quadgraph(d, doc.slopes, base, alpha)
    P = lift_to_zd(d, alpha, doc.slopes, base)
    keep = {v: vals[v] for v in vals if _within_depth(P, v, args.depth)}
    if args.sector is not None:
        keep = {v: z for v, z in keep.items() if sheets[v] == args.sector}
    # CR holds on every face whose corners share a sheet
    faces = [f for f in d.faces if len({sheets[v] for v in f}) == 1]
    res = max((_face_cr(vals, f, d.positions) for f in faces), default=0.0)
    ok = res <= args.tolerance
    doc.functions["log"] = keep
    _emit(args, {"base": base, "cr_residual": res, "values": _vertex_map(keep),
                 "sheets": {str(v): sheets[v] for v in sorted(keep)}, "pass": ok}, doc, "heatmap", "log")
    return _status(ok)


def cmd_power(args):
    from .nonlinear import PatternRejected, check_cross_ratio_solution, check_hirota_solution, circle_pattern_extract
    from .special import PowerParameters, power_on_quadgraph

    if not 0 < args.gamma < 1:
        raise UsageError(f"--gamma must lie in (0, 1), got {args.gamma}")
    doc = _load_doc(args)
    d, alpha, base = _setup(doc)
    m = args.sector or 1
    sub, w, z, _ = power_on_quadgraph(d, doc.slopes, base, m, PowerParameters(args.gamma), alpha)
    sub_alpha = labeling_from_realization(sub, Realization(sub.positions))
    report = {"gamma": args.gamma, "sector": m,
              "hirota_residual": check_hirota_solution(w, sub, sub_alpha),
              "cross_ratio_residual": check_cross_ratio_solution(z, sub, sub_alpha),
              "w": _vertex_map(w), "z": _vertex_map(z)}
    ok = max(report["hirota_residual"], report["cross_ratio_residual"]) <= args.tolerance
    out = docmod.TilingDocument.from_quadgraph(sub, doc.slopes, doc.kind, base)
    out.functions = {"w": w, "z": z}
    out.covering = {"sector": m, "branch_offsets": [t.imag for t in doc.slopes.branch_logs(m)]}
    try:
        pat = circle_pattern_extract(z, sub, sub_alpha)
        out.pattern = pat.to_json()
        report["pattern"] = {"center_color": pat.center_color, "circles": len(pat.centers)}
    except PatternRejected as exc:
        report["pattern"] = {"rejected": str(exc)}
        ok = False
    report["pass"] = ok
    _emit(args, report, out, "pattern" if out.pattern else "tiling")
    return _status(ok)


def cmd_consistency(args):
    rng = np.random.default_rng(args.seed)
    rep = integ.random_cubes(args.kind, args.trials, rng)
    dev = float(np.max(rep.deviation))
    out = {"kind": args.kind, "trials": args.trials, "max_deviation": dev}
    if rep.closed_form_deviation is not None:
        out["closed_form_deviation"] = float(np.max(rep.closed_form_deviation))
        dev = max(dev, out["closed_form_deviation"])
    ok = dev <= args.tolerance
    out["pass"] = ok
    _emit(args, out)
    return _status(ok)


def cmd_isomonodromy(args):
    from .special import PowerParameters, log_sheet, power_w_sheet

    s = _load_doc(args).slopes
    m = args.sector or 1
    if args.kind == "cr":
        sheet = log_sheet(m, s, args.depth)
        rep = integ.verify_isomonodromy("cr", sheet.values, sheet.labels, seed=args.seed)
    else:
        if args.gamma is None or not 0 < args.gamma < 1:
            raise UsageError("--gamma in (0, 1) is required for the Hirota system")
        sheet = power_w_sheet(m, PowerParameters(args.gamma), s, args.depth)
        rep = integ.verify_isomonodromy("hirota", sheet.values, sheet.labels, args.gamma, seed=args.seed)
    ok = rep.worst() <= args.tolerance
    out = rep.to_json()
    out.update(sector=m, depth=args.depth, worst=rep.worst(), **{"pass": ok})
    _emit(args, out)
    return _status(ok)


def cmd_tangent(args):
    from .linearization import power_family, tangent_check

    doc = _load_doc(args)
    d, alpha, base = _setup(doc)
    m = args.sector or 1
    sub, wfam, zfam, _ = power_family(d, doc.slopes, base, m, alpha)
    rep = tangent_check(wfam, zfam, sub, sub.positions, 0.5, args.h, real_color="black")
    worst = max(rep.f_cr, rep.g_cr, rep.f_vs_g)
    ok = worst <= args.tolerance
    out = rep.to_json()
    out.update(sector=m, worst=worst, **{"pass": ok})
    _emit(args, out)
    return _status(ok)


def cmd_render(args):
    doc = _load_doc(args)
    if doc.covering is not None and "face_sectors" not in doc.covering and args.layer == "sectors":
        doc.covering = None
    if args.layer == "sectors" and doc.covering is None:
        d, alpha, base = _setup(doc)
        P = lift_to_zd(d, alpha, doc.slopes, base)
        U = sector_decomposition(d, alpha, doc.slopes, base)
        face_sectors = []
        for f in d.faces:
            inside = [m for m in sorted(U) if all(v in U[m] for v in f)]
            face_sectors.append(inside[0] if inside else sector_of(doc.slopes, P[f[0]]))
        doc.covering = {"face_sectors": face_sectors}
    try:
        text = render_svg(doc, args.layer, args.payload)
    except docmod.DocumentError as exc:
        raise UsageError(str(exc)) from exc
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dcomplex", description="Discrete holomorphic functions on rhombic quad-graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=1e-9, fmt=("json",)):
        sp.add_argument("--input", help="tiling document (JSON); default: a generated tiling")
        sp.add_argument("--output", help="output path (default stdout)")
        sp.add_argument("--format", choices=fmt, default="json")
        sp.add_argument("--tolerance", type=float, default=tol)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tiling", choices=("square", "dual-kagome", "penrose"), default="square",
                        help="tiling to generate when --input is absent")
        sp.add_argument("--radius", type=float, default=None)

    g = sub.add_parser("generate", help="generate a rhombic tiling document")
    g.add_argument("--kind", choices=("square", "dual-kagome", "penrose"), default="square")
    g.add_argument("--size", type=int, nargs="+")
    g.add_argument("--radius", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output")
    g.add_argument("--format", choices=("json", "svg"), default="json")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="embeddability and integrability of the labeling")
    common(c, 1e-10)
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("exp", help="discrete exponential e(.; z)")
    common(e, 1e-10, ("json", "svg"))
    e.add_argument("--z", type=_complex, default=0.5 + 0.25j)
    e.set_defaults(func=cmd_exp)

    r = sub.add_parser("reconstruct", help="contour-integral reconstruction of random holomorphic functions")
    common(r, 1e-6)
    r.add_argument("--trials", type=int, default=20)
    r.add_argument("--depth", type=int, default=4)
    r.set_defaults(tiling="dual-kagome")
    r.set_defaults(func=cmd_reconstruct)

    gr = sub.add_parser("green", help="Green's function log/(2π) on the black vertices")
    common(gr, 1e-10, ("json", "svg"))
    gr.add_argument("--depth", type=int, default=None)
    gr.set_defaults(func=cmd_green)

    lg = sub.add_parser("log", help="discrete logarithm pulled back to the tiling")
    common(lg, 1e-9, ("json", "svg"))
    lg.add_argument("--depth", type=int, default=None)
    lg.add_argument("--sector", type=int, default=None)
    lg.set_defaults(func=cmd_log)

    pw = sub.add_parser("power", help="discrete power z^{2γ} and its circle pattern on a sector")
    common(pw, 1e-9, ("json", "svg"))
    pw.add_argument("--gamma", type=float, required=True)
    pw.add_argument("--sector", type=int, default=1)
    pw.set_defaults(func=cmd_power)

    cs = sub.add_parser("consistency", help="3D consistency fuzz")
    common(cs, 1e-10)
    cs.add_argument("--kind", choices=("cr", "cross-ratio", "hirota"), default="hirota")
    cs.add_argument("--trials", type=int, default=1000)
    cs.set_defaults(func=cmd_consistency)

    im = sub.add_parser("isomonodromy", help="recursion for A(n; λ) against the closed pole forms")
    common(im, 1e-9)
    im.add_argument("--kind", choices=("cr", "hirota"), default="cr")
    im.add_argument("--depth", type=int, default=6)
    im.add_argument("--gamma", type=float, default=None)
    im.add_argument("--sector", type=int, default=1)
    im.set_defaults(func=cmd_isomonodromy)

    tg = sub.add_parser("tangent", help="tangent vectors to the power family at γ = 1/2")
    common(tg, 1e-6)
    tg.add_argument("--h", type=float, default=1e-4)
    tg.add_argument("--sector", type=int, default=1)
    tg.set_defaults(func=cmd_tangent)

    rd = sub.add_parser("render", help="render a document as SVG")
    rd.add_argument("--input", required=True)
    rd.add_argument("--output")
    rd.add_argument("--layer", choices=LAYERS, default="tiling")
    rd.add_argument("--payload", help="function payload for the heatmap layer")
    rd.set_defaults(func=cmd_render, tiling="square", radius=None, seed=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if getattr(args, "radius", None) is not None and args.radius <= 0:
        parser.print_usage(sys.stderr)
        print("dcomplex: error: --radius must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dcomplex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
