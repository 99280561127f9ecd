"""Rhombic quad-graph generators: square lattice, dual kagome, Penrose (multigrid)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .graph import QuadGraph, quadgraph_from_faces
from .labeling import SlopeData

KAGOME_SLOPES = tuple(cmath.exp((2 * k - 1) * math.pi * 1j / 6) for k in (1, 2, 3))
# canonical order of the tenth roots with argument in [0, pi); same line families as exp(2πik/5)
PENROSE_SLOPES = tuple(cmath.exp(1j * math.pi * k / 5) for k in range(5))
SQUARE_SLOPES = (1 + 0j, 1j)


@dataclass(frozen=True)
class Tiling:
    quadgraph: QuadGraph
    slopes: SlopeData
    base: int
    kind: str
    lift: dict  # vertex -> integer coordinates relative to the base


def _finish(kind, coords: dict, faces_k, alphas, base_key) -> Tiling:
    """Assemble a Tiling from integer-coordinate vertices and faces given by coordinates."""
    keys = sorted(coords)
    vid = {k: i for i, k in enumerate(keys)}
    b = np.array(base_key)
    pos = {}
    lift = {}
    for k in keys:
        n = np.array(k) - b
        lift[vid[k]] = tuple(int(x) for x in n)
        pos[vid[k]] = complex(sum(int(x) * a for x, a in zip(n, alphas)))
    faces = [tuple(vid[c] for c in f) for f in faces_k]
    qg = quadgraph_from_faces(faces, pos, black_seed=vid[base_key])
    return Tiling(qg, SlopeData(tuple(alphas), cmath.phase(alphas[0]) % (2 * math.pi)), vid[base_key], kind, lift)


def square(nx: int, ny: int | None = None, radius: int | None = None) -> Tiling:
    """Patch of Z^2 with unit squares; ``radius`` gives [-R, R]^2, otherwise nx x ny squares."""
    if radius is not None:
        lo, hix, hiy = -radius, radius, radius
    else:
        ny = nx if ny is None else ny
        lo = 0
        hix, hiy = nx, ny
    loy = lo
    base = (0, 0) if radius is not None else (nx // 2, ny // 2)
    coords = {(i, j): None for i in range(lo, hix + 1) for j in range(loy, hiy + 1)}
    faces = [((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))
             for i in range(lo, hix) for j in range(loy, hiy)]
    return _finish("square", coords, faces, SQUARE_SLOPES, base)


def multigrid(alphas, offsets, radius: float, kind: str = "multigrid") -> Tiling:
    """Dualize the multigrid with unit normals ``alphas`` and the given offsets.

    Grid family k consists of the lines Re(z conj(alpha_k)) + offsets[k] ∈ Z.
    Each intersection of two lines inside the disk of the given radius becomes
    a rhombus with edges alpha_j, alpha_k; vertices are the integer vectors
    K(z)_i = ceil(Re(z conj(alpha_i)) + offsets[i]) of the adjacent regions.
    """
    alphas = [complex(a) for a in alphas]
    d = len(alphas)
    g = np.asarray(offsets, dtype=float)
    coords = {}
    faces = []
    span = int(math.ceil(radius)) + 2
    for j in range(d):
        for k in range(j + 1, d):
            aj, ak = alphas[j], alphas[k]
            M = np.array([[aj.real, aj.imag], [ak.real, ak.imag]])
            Minv = np.linalg.inv(M)
            for Nj in range(-span, span + 1):
                for Nk in range(-span, span + 1):
                    x, y = Minv @ np.array([Nj - g[j], Nk - g[k]])
                    z = complex(x, y)
                    if abs(z) > radius:
                        continue
                    K = []
                    for i in range(d):
                        t = (z * alphas[i].conjugate()).real + g[i]
                        if i == j:
                            K.append(Nj)
                        elif i == k:
                            K.append(Nk)
                        else:
                            if abs(t - round(t)) < 1e-9:
                                raise ValueError("non-generic offsets: triple intersection")
                            K.append(math.ceil(t))
                    K0 = tuple(K)
                    K1 = list(K); K1[j] += 1
                    K2 = list(K1); K2[k] += 1
                    K3 = list(K); K3[k] += 1
                    quad = [K0, tuple(K1), tuple(K2), tuple(K3)]
                    for c in quad:
                        coords[c] = None
                    faces.append(tuple(quad))
    # base: even vertex with a full flower, nearest to the image of z = 0
    keys = sorted(coords)
    tmp_id = {c: i for i, c in enumerate(keys)}
    interior = quadgraph_from_faces([tuple(tmp_id[c] for c in f) for f in faces]).interior
    K_origin = tuple(math.ceil(gi) for gi in g)
    p0 = sum(x * a for x, a in zip(K_origin, alphas))
    ranked = sorted(keys, key=lambda c: (round(abs(sum(x * a for x, a in zip(c, alphas)) - p0), 12), c))
    base = next(c for c in ranked if sum(c) % 2 == 0 and tmp_id[c] in interior)
    return _finish(kind, coords, faces, alphas, base)


def generic_offsets(d: int, rng: np.random.Generator, sum_zero: bool = False) -> np.ndarray:
    g = rng.uniform(0.05, 0.95, size=d)
    if sum_zero:
        g[-1] = -g[:-1].sum()
    return g


def _with_rejitter(build, d, seed, sum_zero=False, tries=20):
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(tries):
        try:
            return build(generic_offsets(d, rng, sum_zero))
        except ValueError as exc:
            last = exc
    raise ValueError(f"could not find generic offsets after {tries} attempts: {last}")


def dual_kagome(radius: float, seed: int = 0) -> Tiling:
    return _with_rejitter(lambda g: multigrid(KAGOME_SLOPES, g, radius, "dual-kagome"), 3, seed)


def penrose(radius: float, seed: int = 0) -> Tiling:
    """Penrose rhombus patch from the pentagrid (normals exp(2πik/5), offsets summing to 0).

    The pentagrid normal exp(2πik/5) for k = 3, 4 points into the lower half
    plane; we use its negative, which flips the sign of the offset, so that
    the slopes come out in canonical order.
    """
    def build(gp):
        # gp: pentagrid offsets for normals zeta^0..zeta^4, summing to zero
        conv = np.array([gp[0], -gp[3], gp[1], -gp[4], gp[2]])
        return multigrid(PENROSE_SLOPES, conv, radius, "penrose")
    return _with_rejitter(build, 5, seed, sum_zero=True)


def generate(kind: str, size=None, radius=None, seed: int = 0) -> Tiling:
    if kind == "square":
        if radius is not None:
            return square(0, radius=int(radius))
        nx, ny = size if isinstance(size, tuple) else (size or 10, size or 10)
        return square(nx, ny)
    if kind == "dual-kagome":
        return dual_kagome(5 if radius is None else radius, seed)
    if kind == "penrose":
        return penrose(8 if radius is None else radius, seed)
    raise ValueError(f"unknown tiling kind {kind!r}")
