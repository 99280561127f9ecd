"""Deterministic SVG rendering of tiling documents.

Layers:
    tiling   rhombus edges and coloured vertices
    pattern  circles of a stored circle pattern over the tiling
    heatmap  vertices coloured by the real part of a function payload
    sectors  faces filled by the sector of the covering each face lies in

The heatmap ramp has 256 steps, interpolating linearly from blue (#2040ff,
lowest value) to red (#ff4020, highest value).
"""

from __future__ import annotations

import math

from .document import DocumentError, TilingDocument

LAYERS = ("tiling", "pattern", "heatmap", "sectors")
RAMP_STEPS = 256
_LO = (0x20, 0x40, 0xFF)
_HI = (0xFF, 0x40, 0x20)
_SECTOR_FILLS = ("#f4d35e", "#9bc1bc", "#ee964b", "#5d576b", "#e6ebe0", "#f95738",
                 "#83b692", "#c2a878", "#6c91c2", "#d295bf")


def _f(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".") if x != 0 else "0"


def ramp(t: float) -> str:
    """Colour of the ramp step containing t in [0, 1]."""
    k = min(RAMP_STEPS - 1, max(0, int(math.floor(t * RAMP_STEPS))))
    u = k / (RAMP_STEPS - 1)
    rgb = tuple(round(a + (b - a) * u) for a, b in zip(_LO, _HI))
    return "#%02x%02x%02x" % rgb


def view_box(points) -> tuple[float, float, float, float]:
    xs = [p.real for p in points]
    ys = [p.imag for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w, h = max(x1 - x0, 1e-9), max(y1 - y0, 1e-9)
    mx, my = 0.05 * w, 0.05 * h
    return x0 - mx, y0 - my, w + 2 * mx, h + 2 * my


def _edges(doc):
    seen = set()
    for f in doc.faces:
        for j in range(4):
            a, b = f[j], f[(j + 1) % 4]
            key = (min(a, b), max(a, b))
            if key not in seen:
                seen.add(key)
                yield key


def render_svg(doc: TilingDocument, layer: str = "tiling", payload: str | None = None) -> str:
    if layer not in LAYERS:
        raise ValueError(f"unknown layer {layer!r}; choose from {', '.join(LAYERS)}")
    pos = doc.positions()
    if not pos:
        raise DocumentError("the document has no vertex positions to draw")
    pts = list(pos.values())
    if layer == "pattern":
        if doc.pattern is None:
            raise DocumentError("layer 'pattern' needs a circle pattern payload")
        for k, c in doc.pattern["centers"].items():
            r = doc.pattern["radii"][k]
            pts += [complex(c[0] - r, c[1] - r), complex(c[0] + r, c[1] + r)]
    vx, vy, vw, vh = view_box(pts)
    stroke = _f(0.02 * min(max(vw, vh), 10.0) / 2)
    rad = _f(0.06)
    # flip y so that the picture has the usual orientation of the complex plane
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_f(vx)} {_f(-(vy + vh))} {_f(vw)} {_f(vh)}">',
           '<g transform="scale(1,-1)">']

    if layer == "sectors":
        if doc.covering is None or "face_sectors" not in doc.covering:
            raise DocumentError("layer 'sectors' needs covering metadata with 'face_sectors'")
        sectors = doc.covering["face_sectors"]
        for i, f in enumerate(doc.faces):
            m = sectors[i]
            fill = "#ffffff" if m is None else _SECTOR_FILLS[(int(m) - 1) % len(_SECTOR_FILLS)]
            poly = " ".join(f"{_f(pos[v].real)},{_f(pos[v].imag)}" for v in f)
            out.append(f'<polygon points="{poly}" fill="{fill}" stroke="none"/>')

    for a, b in _edges(doc):
        pa, pb = pos[a], pos[b]
        out.append(f'<line x1="{_f(pa.real)}" y1="{_f(pa.imag)}" x2="{_f(pb.real)}" y2="{_f(pb.imag)}" '
                   f'stroke="#888888" stroke-width="{stroke}"/>')

    if layer == "heatmap":
        if not doc.functions:
            raise DocumentError("layer 'heatmap' needs a function payload")
        name = payload or sorted(doc.functions)[0]
        if name not in doc.functions:
            raise DocumentError(f"no function payload named {name!r}")
        vals = {v: z.real for v, z in doc.functions[name].items() if v in pos}
        lo, hi = min(vals.values()), max(vals.values())
        span = hi - lo if hi > lo else 1.0
        for v in sorted(vals):
            p = pos[v]
            out.append(f'<circle cx="{_f(p.real)}" cy="{_f(p.imag)}" r="{_f(0.18)}" '
                       f'fill="{ramp((vals[v] - lo) / span)}"/>')
    else:
        for v, c, _ in doc.vertices:
            if v in pos:
                p = pos[v]
                fill = "#000000" if c == "black" else "#ffffff"
                out.append(f'<circle cx="{_f(p.real)}" cy="{_f(p.imag)}" r="{rad}" fill="{fill}" '
                           f'stroke="#000000" stroke-width="{stroke}"/>')

    if layer == "pattern":
        for k in sorted(doc.pattern["centers"], key=int):
            c = doc.pattern["centers"][k]
            r = doc.pattern["radii"][k]
            out.append(f'<circle cx="{_f(c[0])}" cy="{_f(c[1])}" r="{_f(r)}" fill="none" '
                       f'stroke="#1f5fbf" stroke-width="{stroke}"/>')

    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"
