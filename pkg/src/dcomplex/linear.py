"""Laplacian, Cauchy-Riemann equations, extension to hulls, discrete exponential, density."""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .graph import QuadGraph, _ukey
from .labeling import Brick, Realization, SlopeData, WeightFunction, compute_hull
from .quadeq import cr_coefficient, cr_solve


class LatticeFunction(Mapping):
    """Complex values on vertices of D, on a brick in Z^d, or on a covering sheet."""

    def __init__(self, values: Mapping, domain: str = "quadgraph", sheet: int | None = None):
        self._v = dict(values)
        self.domain = domain
        self.sheet = sheet

    def __getitem__(self, key):
        return self._v[key]

    def __iter__(self):
        return iter(self._v)

    def __len__(self):
        return len(self._v)

    def __repr__(self):
        return f"LatticeFunction({len(self._v)} values, domain={self.domain!r}, sheet={self.sheet})"


@dataclass
class AxisData:
    """Values f_n^(k) along the semi-axes n eps_k e_k, n = 0..N."""

    values: list  # list of sequences, one per k
    signs: tuple = ()

    def __post_init__(self):
        f0 = [v[0] for v in self.values]
        if any(abs(complex(x) - complex(f0[0])) > 1e-15 for x in f0):
            raise ValueError("axis sequences disagree at n = 0")
        if not self.signs:
            self.signs = (1,) * len(self.values)


def black_neighbors(d: QuadGraph, x) -> list:
    """G-neighbours of a black vertex via the faces around it."""
    out = []
    for fi in d.vertex_faces.get(x, ()):
        x0, _, x1, _ = d.faces[fi]
        out.append(x1 if x == x0 else x0)
    return out


def laplacian_apply(f: Mapping, nu: WeightFunction, d: QuadGraph, color: str = "black") -> LatticeFunction:
    """(Δf)(x0) = Σ nu(x0, x)(f(x) - f(x0)) at interior vertices of G (or G* with color='white')."""
    out = {}
    for v in sorted(d.interior):
        if (color == "black") != (v in d.black) or v == d.outer:
            continue
        acc = 0j
        for fi in d.vertex_faces[v]:
            x0, y0, x1, y1 = d.faces[fi]
            if color == "black":
                u = x1 if v == x0 else x0
            else:
                u = y1 if v == y0 else y0
            if _ukey(u, v) not in nu.nu:
                raise KeyError(f"no weight on edge {(v, u)}")
            acc += nu.nu[_ukey(u, v)] * (f[u] - f[v])
        out[v] = acc
    return LatticeFunction(out)


def cr_residuals(f: Mapping, d: QuadGraph, p: Realization | Mapping) -> np.ndarray:
    pos = p.positions if isinstance(p, Realization) else p
    res = np.empty(len(d.faces))
    for i, (x0, y0, x1, y1) in enumerate(d.faces):
        res[i] = abs((f[y1] - f[y0]) * (pos[x1] - pos[x0]) - (f[x1] - f[x0]) * (pos[y1] - pos[y0]))
    return res


def check_cauchy_riemann(f: Mapping, d: QuadGraph, p: Realization | Mapping) -> float:
    """Max face residual |(f(y1)-f(y0))(p(x1)-p(x0)) - (f(x1)-f(x0))(p(y1)-p(y0))|."""
    return float(cr_residuals(f, d, p).max(initial=0.0))


def _squares_at(n, dim):
    """All elementary squares (base, j, k) having n as a corner."""
    for j in range(dim):
        for k in range(j + 1, dim):
            for dj in (0, 1):
                for dk in (0, 1):
                    base = list(n)
                    base[j] -= dj
                    base[k] -= dk
                    yield tuple(base), j, k


def _corners(base, j, k):
    b10 = list(base); b10[j] += 1
    b01 = list(base); b01[k] += 1
    b11 = list(b10); b11[k] += 1
    return base, tuple(b10), tuple(b01), tuple(b11)


def extend_to_hull(f: Mapping, s: SlopeData, order: str = "fifo", tol: float = 1e-9) -> LatticeFunction:
    """Extend a CR-holomorphic function on Ω ⊂ Z^d to its hull brick.

    Repeatedly completes elementary squares with three known corners.  With
    ``order='lifo'`` the worklist is processed as a stack instead of a queue,
    giving a different fill order with the same result.  Squares that end up
    with four known corners are checked; a violation means the input was not
    discrete holomorphic.
    """
    known = {tuple(k): complex(v) for k, v in f.items()}
    if not known:
        raise ValueError("empty input")
    brick = compute_hull(known)
    dim = brick.dim
    alphas = s.alphas
    scale = max(1.0, max(abs(v) for v in known.values()))

    def square_residual(vals, j, k):
        f00, f10, f01, f11 = vals
        c = cr_coefficient(alphas[j], alphas[k])
        return abs(f11 - f00 - c * (f10 - f01))

    for n in list(known):
        for base, j, k in _squares_at(n, dim):
            cs = _corners(base, j, k)
            if base == min(cs) and all(c in known for c in cs):
                r = square_residual([known[c] for c in cs], j, k)
                if r > tol * scale:
                    raise ValueError(f"input is not discrete holomorphic on square {cs} (residual {r:.3g})")

    work = deque(known)
    pop = work.popleft if order == "fifo" else work.pop
    while work:
        n = pop()
        for base, j, k in _squares_at(n, dim):
            cs = _corners(base, j, k)
            if not all(c in brick for c in cs):
                continue
            miss = [i for i, c in enumerate(cs) if c not in known]
            if len(miss) != 1:
                continue
            vals = [known.get(c) for c in cs]
            new = cr_solve(vals[0], vals[1], vals[2], vals[3], alphas[j], alphas[k])
            known[cs[miss[0]]] = new
            work.append(cs[miss[0]])
    if len(known) != len(brick):
        raise ValueError(f"fill reached {len(known)} of {len(brick)} brick points: malformed domain")
    return LatticeFunction(known, domain="brick")


def _check_poles(z, alphas, n=None):
    for k, a in enumerate(alphas):
        if n is not None and n[k] == 0:
            continue
        if z == a or z == -a:
            raise ZeroDivisionError(f"z = {z} is a pole of the discrete exponential")


def discrete_exponential(n, z: complex, s: SlopeData | tuple) -> complex:
    """e(n; z) = prod_k ((z + alpha_k)/(z - alpha_k))^{n_k}."""
    alphas = s.alphas if isinstance(s, SlopeData) else tuple(s)
    _check_poles(z, alphas, n)
    out = 1.0 + 0j
    for nk, a in zip(n, alphas):
        if nk:
            out *= ((z + a) / (z - a)) ** nk
    return out


def exponential_array(points: np.ndarray, lam: np.ndarray, alphas) -> np.ndarray:
    """e(n; λ) for an (M, d) integer array of points and an array of λ: shape (M, len(λ))."""
    points = np.asarray(points)
    lam = np.asarray(lam, dtype=complex)
    out = np.ones((points.shape[0], lam.size), dtype=complex)
    for k, a in enumerate(alphas):
        ratio = (lam + a) / (lam - a)
        out *= ratio[None, :] ** points[:, k][:, None]
    return out


@dataclass(frozen=True)
class QuadratureConfig:
    radius_factor: float = 0.4
    nodes: int = 512
    rel_stop: float = 1e-14


@dataclass
class ReconstructionResult:
    series: dict  # pole -> coefficients c_n of u^n, u = (λ - pole)/(λ + pole)
    error: float
    radius: float
    dropped_terms: dict = field(default_factory=dict)

    def g(self, pole, lam):
        c = self.series[pole]
        u = (lam - pole) / (lam + pole)
        return np.polyval(c[::-1], u) / (2 * lam) if len(c) else 0 * lam


def _series(axis, rel_stop):
    """Coefficients c_0 = f_1 - f_0, c_n = f_{n+1} - f_{n-1}, trailing small terms dropped."""
    axis = np.asarray(axis, dtype=complex)
    if len(axis) < 2:
        return np.zeros(0, dtype=complex), 0
    c = np.empty(len(axis) - 1, dtype=complex)
    c[0] = axis[1] - axis[0]
    c[1:] = axis[2:] - axis[:-2]
    run = np.maximum.accumulate(np.abs(c))
    keep = len(c)
    while keep > 0 and abs(c[keep - 1]) < rel_stop * run[keep - 1]:
        keep -= 1
    return c[:keep], len(c) - keep


def loop_integral(func, center: complex, radius: float, nodes: int = 512) -> complex:
    """(1/2πi) ∮ func(λ) dλ over a circle, trapezoidal rule."""
    t = 2 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * t)
    return complex(np.mean(func(center + w) * w))


def integral_reconstruct(f: Mapping, s: SlopeData, config: QuadratureConfig = QuadratureConfig()) -> ReconstructionResult:
    """Rebuild f(n) - f(0) from its axis data by contour integrals of g(λ) e(n; λ).

    ``f`` maps points of a brick containing the origin to values.  For each
    pole ±alpha_k the series g_{±k} is assembled from the differences along
    the corresponding semi-axis; only finitely many axis values exist, so the
    series is a polynomial in (λ ∓ α_k)/(λ ± α_k), which is enough for every
    point of the brick.
    """
    pts = sorted(f)
    brick = compute_hull(pts)
    dim = brick.dim
    origin = (0,) * dim
    if origin not in f:
        raise ValueError("brick must contain the origin")
    alphas = s.alphas
    poles = list(alphas) + [-a for a in alphas]
    dmin = min(abs(p - q) for i, p in enumerate(poles) for q in poles[i + 1:])
    if config.radius_factor >= 0.5:
        raise ValueError("loops would overlap neighbouring poles (radius_factor >= 0.5)")
    r = config.radius_factor * dmin

    series, dropped = {}, {}
    for k, a in enumerate(alphas):
        for sign, pole in ((1, a), (-1, -a)):
            axis = []
            n = 0
            while True:
                pt = [0] * dim
                pt[k] = sign * n
                pt = tuple(pt)
                if pt not in f:
                    break
                axis.append(complex(f[pt]))
                n += 1
            c, nd = _series(axis, config.rel_stop)
            series[pole] = c
            dropped[pole] = nd

    P = np.array(pts, dtype=int)
    t = 2 * np.pi * np.arange(config.nodes) / config.nodes
    w = r * np.exp(1j * t)
    rec = np.zeros(len(pts), dtype=complex)
    for pole, c in series.items():
        if len(c) == 0 or not np.any(c):
            continue
        lam = pole + w
        u = (lam - pole) / (lam + pole)
        g = np.polyval(c[::-1], u) / (2 * lam)
        E = exponential_array(P, lam, alphas)
        rec += (E * (g * w)[None, :]).mean(axis=1)
    f0 = complex(f[origin])
    target = np.array([complex(f[p]) for p in pts]) - f0
    err = float(np.max(np.abs(rec - target)))
    return ReconstructionResult(series, err, r, dropped)


def random_holomorphic(shape, s: SlopeData, rng: np.random.Generator, bound: float = 2.0) -> np.ndarray:
    """CR-holomorphic function on the box [0, shape-1] from random axis data with |f_n| <= bound."""
    from .quadeq import fill_box

    f0 = bound * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    axes = []
    for N in shape:
        mag = bound * np.sqrt(rng.uniform(size=N))
        ax = mag * np.exp(2j * np.pi * rng.uniform(size=N))
        ax[0] = f0
        axes.append(ax)
    return fill_box("cr", axes, s.alphas)


def box_to_mapping(values: np.ndarray, signs=None) -> dict:
    """Dense octant array -> {lattice point: value}; ``signs`` flips coordinates."""
    signs = np.ones(values.ndim, dtype=int) if signs is None else np.asarray(signs)
    return {tuple(int(x) for x in np.multiply(idx, signs)): complex(v) for idx, v in np.ndenumerate(values)}
