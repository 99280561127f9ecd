"""Cross-ratio and Hirota systems on quad-graphs, the w <-> z correspondence, circle patterns."""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import QuadGraph, _ukey
from .labeling import EdgeLabeling

KITE_TOL = 1e-7


class ClosureError(ValueError):
    """Edge data do not integrate around some face."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


def cross_ratio(z0, z1, z2, z3):
    """q(z0, z1, z2, z3) = (z0 - z1)(z2 - z3) / ((z1 - z2)(z3 - z0))."""
    den = (z1 - z2) * (z3 - z0)
    if np.any(np.asarray(den) == 0):
        raise ZeroDivisionError("cross-ratio with coinciding consecutive points")
    return (z0 - z1) * (z2 - z3) / den


@dataclass
class CrossRatioData:
    """Q on undirected edges of G and G*, keyed by the face's primal and dual diagonals."""

    Q: dict

    @classmethod
    def from_labeling(cls, d: QuadGraph, alpha: EdgeLabeling) -> "CrossRatioData":
        out = {}
        for fc in d.faces:
            x0, y0, x1, y1 = fc
            a0, a1 = alpha.face_labels(fc)
            q = a0 * a0 / (a1 * a1)
            out[_ukey(x0, x1)] = q
            out[_ukey(y0, y1)] = 1 / q
        return cls(out)

    def dual_defect(self, d: QuadGraph) -> float:
        """max |Q(e) Q(e*) - 1|."""
        return max((abs(self.Q[_ukey(x0, x1)] * self.Q[_ukey(y0, y1)] - 1) for x0, y0, x1, y1 in d.faces),
                   default=0.0)


def cross_ratio_residuals(z: dict, d: QuadGraph, alpha: EdgeLabeling) -> np.ndarray:
    out = np.empty(len(d.faces))
    for i, fc in enumerate(d.faces):
        x0, y0, x1, y1 = fc
        a0, a1 = alpha.face_labels(fc)
        out[i] = abs(cross_ratio(z[x0], z[y0], z[x1], z[y1]) - a0 * a0 / (a1 * a1))
    return out


def check_cross_ratio_solution(z: dict, d: QuadGraph, alpha: EdgeLabeling) -> float:
    """Max over faces of |q(z(x0), z(y0), z(x1), z(y1)) - a0^2/a1^2|."""
    return float(cross_ratio_residuals(z, d, alpha).max(initial=0.0))


def hirota_residuals(w: dict, d: QuadGraph, alpha: EdgeLabeling) -> np.ndarray:
    out = np.empty(len(d.faces))
    for i, fc in enumerate(d.faces):
        x0, y0, x1, y1 = fc
        a0, a1 = alpha.face_labels(fc)
        out[i] = abs(a0 * w[x0] * w[y0] + a1 * w[y0] * w[x1] - a0 * w[x1] * w[y1] - a1 * w[y1] * w[x0])
    return out


def check_hirota_solution(w: dict, d: QuadGraph, alpha: EdgeLabeling) -> float:
    """Max over faces of |a0 w(x0)w(y0) + a1 w(y0)w(x1) - a0 w(x1)w(y1) - a1 w(y1)w(x0)|."""
    return float(hirota_residuals(w, d, alpha).max(initial=0.0))


def black_white_scale(w: dict, d: QuadGraph, c: complex) -> dict:
    return {v: (c * x if v in d.black else x / c) for v, x in w.items()}


# ---------------------------------------------------------------- w <-> z

@dataclass
class Integration:
    values: dict
    closure: np.ndarray  # per-face closure defect
    histogram: tuple = field(default=())  # (counts, log10 bin edges)

    @property
    def max_defect(self) -> float:
        return float(self.closure.max(initial=0.0))


def _tree_integrate(d: QuadGraph, root, start, step):
    """Breadth-first integration of val(y) = step(x, y, val(x)) from val(root) = start."""
    out = {root: start}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in d.neighbors[x]:
            if y not in out:
                out[y] = step(x, y, out[x])
                queue.append(y)
    return out


def _histogram(defects):
    edges = np.arange(-18, 1, 2, dtype=float)
    counts, _ = np.histogram(np.log10(np.maximum(defects, 1e-18)), bins=edges)
    return tuple(int(c) for c in counts), tuple(edges)


def z_from_w(w: dict, d: QuadGraph, alpha: EdgeLabeling, z0: complex = 0j, root=None, tol: float = 1e-10) -> Integration:
    """Integrate z(y) - z(x) = w(x) w(y) alpha(x, y) from z(root) = z0 along a BFS tree."""
    root = min(d.black) if root is None else root
    z = _tree_integrate(d, root, complex(z0), lambda x, y, zx: zx + w[x] * w[y] * alpha[(x, y)])
    closure = np.empty(len(d.faces))
    for i, fc in enumerate(d.faces):
        acc = 0j
        scale = 0.0
        for j in range(4):
            x, y = fc[j], fc[(j + 1) % 4]
            t = w[x] * w[y] * alpha[(x, y)]
            acc += t
            scale = max(scale, abs(t))
        closure[i] = abs(acc) / max(1.0, scale)
    res = Integration(z, closure, _histogram(closure))
    if res.max_defect > tol:
        worst = d.faces[int(np.argmax(closure))]
        raise ClosureError(f"w does not close around face {worst} (defect {res.max_defect:.3g}); "
                           "input is not a Hirota solution", worst)
    return res


def w_from_z(z: dict, d: QuadGraph, alpha: EdgeLabeling, root=None, tol: float = 1e-9) -> dict:
    """Recover w from w(x) w(y) = (z(y) - z(x))/alpha(x, y), up to black-white scaling.

    Normalization: w(root) = |z(root) - z(v)| for the first neighbour v of
    root (real positive); root defaults to the smallest white vertex.  For
    a circle pattern with centers at the root's colour this makes w the
    radius there and unimodular on the other colour.
    """
    root = min(d.white) if root is None else root
    nb = min(d.neighbors[root])
    start = abs(z[nb] - z[root])
    if start == 0:
        raise ValueError("z is degenerate at the root")
    w = _tree_integrate(d, root, complex(start), lambda x, y, wx: (z[y] - z[x]) / alpha[(x, y)] / wx)
    for fc in d.faces:
        for j in range(4):
            x, y = fc[j], fc[(j + 1) % 4]
            target = (z[y] - z[x]) / alpha[(x, y)]
            if abs(w[x] * w[y] - target) > tol * max(1.0, abs(target)):
                raise ClosureError(f"inconsistent edge ratios on face {fc}: z is not a cross-ratio solution", fc)
    return w


# ---------------------------------------------------------------- circle patterns

class PatternRejected(ValueError):
    def __init__(self, message, face=None, defect=None):
        super().__init__(message)
        self.face = face
        self.defect = defect


@dataclass
class CirclePattern:
    center_color: str  # 'white' or 'black'
    centers: dict  # center vertex -> complex
    radii: dict  # center vertex -> float
    points: dict  # intersection vertex -> complex
    angles: dict  # undirected pair of center vertices -> intersection angle in (0, pi)
    measured: dict = field(default_factory=dict)  # same keys, angle from the radii directions

    def to_json(self) -> dict:
        return {
            "center_color": self.center_color,
            "centers": {str(k): [v.real, v.imag] for k, v in sorted(self.centers.items())},
            "radii": {str(k): v for k, v in sorted(self.radii.items())},
            "points": {str(k): [v.real, v.imag] for k, v in sorted(self.points.items())},
            "angles": {f"{a},{b}": v for (a, b), v in sorted(self.angles.items())},
        }


def _oriented(fc, center_color, d):
    """Rotate a face so that the intersection points sit at positions 0 and 2."""
    x0, y0, x1, y1 = fc
    if center_color == "white":
        return x0, y0, x1, y1
    return y0, x1, y1, x0


def _reduction_spread(w: dict, unit_on, real_on):
    mods = np.array([abs(w[v]) for v in unit_on])
    args = np.array([cmath.phase(w[v]) for v in real_on])
    s1 = float((mods.max() - mods.min()) / max(mods.max(), 1e-300)) if len(mods) else 0.0
    if len(args):
        ref = args[0]
        s2 = float(np.max(np.abs(np.angle(np.exp(1j * (args - ref))))))
    else:
        s2 = 0.0
    return max(s1, s2)


def circle_pattern_extract(z: dict, d: QuadGraph, alpha: EdgeLabeling, tol: float = KITE_TOL,
                           center_color: str | None = None, check_integrable: bool = True) -> CirclePattern:
    """Read a circle pattern off a cross-ratio solution z.

    Accepts iff, after a black-white scaling, w is unimodular on the
    intersection points and real positive on the centers (within ``tol``).
    The colour carrying the centers is detected unless given.  Angles come
    from q(z(x0), z(y0), z(x1), z(y1)) = exp(2i phi); each is compared with
    the angle between the radii at an intersection point.
    """
    try:
        w = w_from_z(z, d, alpha, tol=tol)
    except ClosureError as exc:
        raise PatternRejected(f"kite conditions violated: {exc}", exc.face) from exc
    black, white = sorted(d.black), sorted(d.white)
    options = ("white", "black") if center_color is None else (center_color,)
    best = None
    for cc in options:
        centers, pts = (white, black) if cc == "white" else (black, white)
        spread = _reduction_spread(w, pts, centers)
        if best is None or spread < best[1]:
            best = (cc, spread)
    cc, spread = best
    centers, pts = (white, black) if cc == "white" else (black, white)
    if spread > tol:
        # locate a worst face for the certificate
        worst, wf = -1.0, None
        for fc in d.faces:
            c0, c1 = (fc[1], fc[3]) if cc == "white" else (fc[0], fc[2])
            p0, p1 = (fc[0], fc[2]) if cc == "white" else (fc[1], fc[3])
            r = max(abs(abs(z[p0] - z[c0]) - abs(z[p1] - z[c0])) / max(abs(z[p0] - z[c0]), 1e-300),
                    abs(abs(z[p0] - z[c1]) - abs(z[p1] - z[c1])) / max(abs(z[p0] - z[c1]), 1e-300))
            if r > worst:
                worst, wf = r, fc
        raise PatternRejected(f"kite conditions violated (spread {spread:.3g}); worst face {wf} "
                              f"with edge-length mismatch {worst:.3g}", wf, worst)
    radii = {}
    for c in centers:
        ds = [abs(z[c] - z[p]) for p in d.neighbors[c]]
        r = float(np.mean(ds))
        if max(abs(x - r) for x in ds) > tol * max(r, 1e-300):
            raise PatternRejected(f"unequal radii at center {c}", None, max(abs(x - r) for x in ds) / r)
        radii[c] = r
    angles, measured = {}, {}
    for fc in d.faces:
        p0, c0, p1, c1 = _oriented(fc, cc, d)
        q = cross_ratio(z[p0], z[c0], z[p1], z[c1])
        # phi is the supplement of the angle between the radii at the intersection point
        u0, u1 = z[p0] - z[c0], z[p0] - z[c1]
        m = (math.pi - cmath.phase(u1 / u0)) % math.pi
        key = _ukey(c0, c1)
        angles[key] = (cmath.phase(q) / 2) % math.pi
        measured[key] = m
        if abs(q - cmath.exp(2j * m)) > tol:
            raise PatternRejected(f"cross-ratio and measured angle disagree on face {fc}", fc, abs(q - cmath.exp(2j * m)))
    pat = CirclePattern(cc, {c: z[c] for c in centers}, radii, {p: z[p] for p in pts}, angles, measured)
    if check_integrable:
        defect = angle_sum_defects(pat, d)
        if defect["centers"] > 1e-8:
            raise PatternRejected(f"angle sums around circles do not vanish mod pi ({defect['centers']:.3g})")
    return pat


def angle_sum_defects(pat: CirclePattern, d: QuadGraph) -> dict:
    """max |prod exp(2i phi) - 1| around interior intersection points and interior centers."""
    centers = set(pat.centers)
    worst_c = worst_p = 0.0
    for v in d.interior:
        prod = 1 + 0j
        for fi in d.vertex_faces[v]:
            p0, c0, p1, c1 = _oriented(d.faces[fi], pat.center_color, d)
            prod *= cmath.exp(2j * pat.angles[_ukey(c0, c1)])
        if v in centers:
            worst_c = max(worst_c, abs(prod - 1))
        else:
            worst_p = max(worst_p, abs(prod - 1))
    return {"centers": worst_c, "points": worst_p}


def hirota_reduction_defect(w: dict, d: QuadGraph, unit_color: str = "black", positive: bool = False) -> float:
    """Distance of w from (unit on ``unit_color``, real on the other colour).

    With ``positive`` the real values must also be positive; a wrong sign
    counts as defect 1.
    """
    unit = d.black if unit_color == "black" else d.white
    worst = 0.0
    for v, x in w.items():
        if v in unit:
            worst = max(worst, abs(abs(x) - 1))
        else:
            dev = abs(x.imag) / max(abs(x), 1e-300)
            if positive and x.real <= 0:
                dev = 1.0
            worst = max(worst, dev)
    return worst


def hirota_fourth_corner(w_x0, w_y0, w_y1, a0, a1):
    """w(x1) from the other three corners."""
    return w_x0 * (a1 * w_y1 - a0 * w_y0) / (a1 * w_y0 - a0 * w_y1)
