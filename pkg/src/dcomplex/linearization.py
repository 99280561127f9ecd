"""Discrete derivative / antiderivative and tangent vectors to families of solutions."""

from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import QuadGraph
from .labeling import EdgeLabeling, Realization, SlopeData, labeling_from_realization
from .linear import LatticeFunction, cr_residuals
from .nonlinear import ClosureError, Integration, _histogram


def _positions(p):
    return p.positions if isinstance(p, Realization) else p


def edge_form(f: dict, p, x, y) -> complex:
    """(f(x) + f(y)) (p(y) - p(x))."""
    pos = _positions(p)
    return (f[x] + f[y]) * (pos[y] - pos[x])


def form_closure(f: dict, d: QuadGraph, p) -> np.ndarray:
    """Per-face sum of the form (f(x) + f(y)) dp around the boundary; zero iff f is discrete holomorphic."""
    out = np.empty(len(d.faces))
    for i, fc in enumerate(d.faces):
        acc = sum(edge_form(f, p, fc[j], fc[(j + 1) % 4]) for j in range(4))
        out[i] = abs(acc)
    return out


def discrete_antiderivative(f: dict, d: QuadGraph, p, g0: complex = 0j, root=None, tol: float = 1e-10) -> Integration:
    """g with g(y) - g(x) = (f(x) + f(y))(p(y) - p(x)), g(root) = g0."""
    root = min(d.black) if root is None else root
    g = {root: complex(g0)}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in d.neighbors[x]:
            if y not in g:
                g[y] = g[x] + edge_form(f, p, x, y)
                queue.append(y)
    scale = max(1.0, max(abs(v) for v in f.values()))
    closure = form_closure(f, d, p) / scale
    res = Integration(g, closure, _histogram(closure))
    if res.max_defect > tol:
        worst = d.faces[int(np.argmax(closure))]
        raise ClosureError(f"f is not discrete holomorphic: form does not close around {worst} "
                           f"(defect {res.max_defect:.3g})", worst)
    return res


def discrete_derivative(g: dict, d: QuadGraph, p, f0: complex = 0.5, root=None, tol: float = 1e-9) -> LatticeFunction:
    """f with f(x) + f(y) = (g(y) - g(x))/(p(y) - p(x)) on every edge, f(root) = f0.

    Unique up to adding c on black and -c on white vertices.
    """
    pos = _positions(p)
    root = min(d.black) if root is None else root
    f = {root: complex(f0)}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in d.neighbors[x]:
            if y not in f:
                f[y] = (g[y] - g[x]) / (pos[y] - pos[x]) - f[x]
                queue.append(y)
    scale = max(1.0, max(abs(v) for v in f.values()))
    for x, y in d.edges:
        r = abs(f[x] + f[y] - (g[y] - g[x]) / (pos[y] - pos[x]))
        if r > tol * scale:
            raise ClosureError(f"g is not discrete holomorphic: edge equations inconsistent at {(x, y)} "
                               f"(defect {r:.3g})")
    return LatticeFunction(f)


# ---------------------------------------------------------------- tangent vectors

@dataclass
class TangentReport:
    param: float
    h: float
    f: dict
    g: dict
    f_cr: float  # max CR residual of f
    g_cr: float
    f_vs_g: float  # max |g(y)-g(x) - (f(x)+f(y))(p(y)-p(x))|
    f_cr_half: float | None = None  # same at h/2 (Richardson check)
    g_cr_half: float | None = None
    parity: float | None = None  # max |Im f| on real colour, |Re f| on imaginary colour
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        keys = ("param", "h", "f_cr", "g_cr", "f_vs_g", "f_cr_half", "g_cr_half", "parity")
        out = {k: getattr(self, k) for k in keys}
        out.update(self.extra)
        return out


def log_difference(wp: dict, wm: dict, h: float) -> dict:
    """log(w_{+h}/w_{-h})/(2h): the logarithmic derivative to O(h^2)."""
    return {v: cmath.log(wp[v] / wm[v]) / (2 * h) for v in wp}


def central_difference(zp: dict, zm: dict, h: float) -> dict:
    return {v: (zp[v] - zm[v]) / (2 * h) for v in zp}


def _tangents(w_family, z_family, param, h):
    return log_difference(w_family(param + h), w_family(param - h), h), \
        central_difference(z_family(param + h), z_family(param - h), h)


def tangent_check(w_family, z_family, d: QuadGraph, p, param: float = 0.5, h: float = 1e-4,
                  real_color: str | None = None, richardson: bool = True) -> TangentReport:
    """Tangents f = d log w and g = dz of a family of solutions by central differences.

    ``w_family`` and ``z_family`` map the parameter to vertex dictionaries.
    At a parameter where the family passes through z = p, w = 1, both
    tangents are discrete holomorphic up to O(h^2) and satisfy the
    derivative relation.  ``real_color`` (if given) is the colour on which
    w is real; f must then be real there and imaginary on the other colour.
    """
    pos = _positions(p)
    f, g = _tangents(w_family, z_family, param, h)
    rep = TangentReport(param, h, f, g,
                        float(cr_residuals(f, d, pos).max(initial=0.0)),
                        float(cr_residuals(g, d, pos).max(initial=0.0)),
                        max(abs(g[y] - g[x] - edge_form(f, pos, x, y)) for x, y in d.edges))
    if richardson:
        f2, g2 = _tangents(w_family, z_family, param, h / 2)
        rep.f_cr_half = float(cr_residuals(f2, d, pos).max(initial=0.0))
        rep.g_cr_half = float(cr_residuals(g2, d, pos).max(initial=0.0))
    if real_color is not None:
        real = d.black if real_color == "black" else d.white
        rep.parity = max(abs(v.imag) if k in real else abs(v.real) for k, v in f.items())
    return rep


def power_family(d: QuadGraph, s: SlopeData, x0, m: int = 1, alpha: EdgeLabeling | None = None):
    """gamma -> w^{2γ-1} and gamma -> z^{2γ} on the sector U_m of D (plus that sub-quad-graph).

    The returned z values are shifted so that z(x0) = p(x0); at gamma = 1/2
    the family passes through z = p, w = 1.
    """
    from .special import PowerParameters, power_on_quadgraph

    if alpha is None:
        alpha = labeling_from_realization(d, Realization(d.positions))
    cache = {}

    def solve(gamma):
        if gamma not in cache:
            sub, w, z, lift = power_on_quadgraph(d, s, x0, m, PowerParameters(gamma), alpha)
            base = d.positions[x0]
            cache[gamma] = (sub, w, {v: base + val for v, val in z.items()}, lift)
        return cache[gamma]

    sub = solve(0.5)[0]
    return sub, (lambda g: solve(g)[1]), (lambda g: solve(g)[2]), solve(0.5)[3]


def constant_family(values: dict):
    return lambda _: dict(values)
