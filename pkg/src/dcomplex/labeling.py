"""Edge labelings, CR weights, slope data, the lift to Z^d, hulls and sectors."""

from __future__ import annotations

import cmath
import math
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product

import numpy as np

from .graph import QuadGraph, _ukey

LABEL_TOL = 1e-9
INDEPENDENCE_TOL = 1e-12


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class Realization:
    """Positions p: V(D) -> C."""

    positions: Mapping

    def __getitem__(self, v) -> complex:
        return complex(self.positions[v])

    def rhombic(self, d: QuadGraph, tol: float = LABEL_TOL) -> bool:
        return all(abs(abs(self[b] - self[a]) - 1.0) <= tol for a, b in d.edges)


class EdgeLabeling(Mapping):
    """alpha on directed edges; both orientations are stored."""

    def __init__(self, values: Mapping):
        self._v = dict(values)

    def __getitem__(self, e):
        return self._v[e]

    def __iter__(self):
        return iter(self._v)

    def __len__(self):
        return len(self._v)

    def face_labels(self, face) -> tuple[complex, complex]:
        """(alpha0, alpha1) = (alpha(x0, y0), alpha(x0, y1))."""
        x0, y0, _, y1 = face
        return self._v[(x0, y0)], self._v[(x0, y1)]

    def labels(self) -> list[complex]:
        return list(self._v.values())

    def check(self, d: QuadGraph, tol: float = LABEL_TOL) -> float:
        """Max violation of the antisymmetry and opposite-edge rules."""
        err = 0.0
        for (a, b), v in self._v.items():
            err = max(err, abs(v + self._v[(b, a)]))
        for x0, y0, x1, y1 in d.faces:
            err = max(err, abs(self._v[(x0, y0)] - self._v[(y1, x1)]),
                      abs(self._v[(x0, y1)] - self._v[(y0, x1)]))
        return err


def labeling_from_realization(d: QuadGraph, p: Realization | Mapping, tol: float = LABEL_TOL) -> EdgeLabeling:
    """alpha(x, y) = p(y) - p(x); every face must be a parallelogram."""
    pos = p.positions if isinstance(p, Realization) else p
    vals = {}
    for a, b in d.edges:
        if a not in pos or b not in pos:
            raise LabelingError(f"no position for edge {(a, b)}")
        v = complex(pos[b]) - complex(pos[a])
        vals[(a, b)] = v
        vals[(b, a)] = -v
    for i, (x0, y0, x1, y1) in enumerate(d.faces):
        if abs(vals[(x0, y0)] - vals[(y1, x1)]) > tol or abs(vals[(x0, y1)] - vals[(y0, x1)]) > tol:
            raise LabelingError(f"face {i} is not a parallelogram")
    return EdgeLabeling(vals)


@dataclass(frozen=True)
class WeightFunction:
    """nu on undirected edges of G and G* (keys are sorted vertex pairs)."""

    nu: Mapping
    pairs: tuple  # (primal edge, dual edge) per face

    def __getitem__(self, e):
        return self.nu[_ukey(*e)]

    def phi(self, e) -> float:
        """Angle with nu = tan(phi/2); only meaningful for real positive nu."""
        return 2.0 * math.atan(self[e].real)


def weights_from_labeling(d: QuadGraph, alpha: EdgeLabeling) -> WeightFunction:
    nu = {}
    pairs = []
    for i, f in enumerate(d.faces):
        x0, y0, x1, y1 = f
        a0, a1 = alpha.face_labels(f)
        if abs(a1 - a0) <= LABEL_TOL or abs(a1 + a0) <= LABEL_TOL:
            raise LabelingError(f"degenerate face {i}: alpha1 = +-alpha0")
        nud = 1j * (a1 + a0) / (a1 - a0)
        e, es = _ukey(x0, x1), _ukey(y0, y1)
        nu[e] = 1.0 / nud
        nu[es] = nud
        pairs.append((e, es))
    return WeightFunction(nu, tuple(pairs))


def integrability_defect(nu: WeightFunction, d: QuadGraph) -> float:
    """Max over interior vertices of |prod (1 + i nu)/(1 - i nu) - 1| around the star.

    At a black vertex the star consists of primal edges, at a white vertex of
    dual edges; the outer white vertex is skipped.
    """
    worst = 0.0
    for v in d.interior:
        if v == d.outer:
            continue
        prod = 1.0 + 0j
        for fi in d.vertex_faces[v]:
            x0, y0, x1, y1 = d.faces[fi]
            e = _ukey(x0, x1) if v in (x0, x1) else _ukey(y0, y1)
            n = nu.nu[e]
            prod *= (1 + 1j * n) / (1 - 1j * n)
        worst = max(worst, abs(prod - 1))
    return worst


def check_integrability(nu: WeightFunction, d: QuadGraph, tol: float = 1e-10) -> bool:
    return integrability_defect(nu, d) <= tol


@dataclass(frozen=True)
class SlopeData:
    """Ordered slopes alpha_1..alpha_d (arguments in [0, pi)) and the base argument theta_1.

    Indices are 1-based and run over all integers: alpha_{m+d} = -alpha_m and
    theta_{m+d} = theta_m + pi.
    """

    alphas: tuple
    theta1: float

    def __post_init__(self):
        a = tuple(complex(x) for x in self.alphas)
        object.__setattr__(self, "alphas", a)
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                if abs((a[i] * a[j].conjugate()).imag) < INDEPENDENCE_TOL:
                    raise LabelingError(f"slopes {a[i]} and {a[j]} are linearly dependent over R")

    @classmethod
    def from_labels(cls, labels, theta1: float | None = None, tol: float = LABEL_TOL) -> "SlopeData":
        uniq: list[complex] = []
        for lab in labels:
            lab = complex(lab)
            if not any(abs(lab - u) <= tol for u in uniq):
                uniq.append(lab)
        for u in uniq:
            if not any(abs(u + v) <= tol for v in uniq):
                uniq.append(-u)
        args = sorted(uniq, key=lambda z: cmath.phase(z) % (2 * math.pi))
        d = len(args) // 2
        alphas = args[:d]
        if theta1 is None:
            theta1 = cmath.phase(alphas[0]) % (2 * math.pi)
        return cls(tuple(alphas), float(theta1))

    @property
    def d(self) -> int:
        return len(self.alphas)

    def _split(self, m: int) -> tuple[int, int]:
        q, r = divmod(m - 1, self.d)
        return q, r

    def alpha(self, m: int) -> complex:
        q, r = self._split(m)
        return self.alphas[r] * (-1) ** q

    def theta(self, m: int) -> float:
        q, r = self._split(m)
        base = self.theta1 + ((cmath.phase(self.alphas[r]) - cmath.phase(self.alphas[0])) % (2 * math.pi))
        return base + q * math.pi

    def eps(self, m: int) -> tuple:
        """Sign vector of the octant S_m (for any integer m)."""
        d = self.d
        mm = (m - 1) % (2 * d) + 1
        if mm <= d:
            return tuple(-1 if k < mm else 1 for k in range(1, d + 1))
        return tuple(1 if k < mm - d else -1 for k in range(1, d + 1))

    def sector_indices(self, m: int) -> tuple:
        """For each k = 1..d the index r in [m, m+d-1] with alpha_r = eps_k alpha_k."""
        d = self.d
        out = []
        for k in range(1, d + 1):
            r = m + ((k - m) % d)
            out.append(r)
        return tuple(out)

    def signed_labels(self, m: int) -> tuple:
        return tuple(self.alpha(r) for r in self.sector_indices(m))

    def branch_logs(self, m: int) -> tuple:
        """log(eps_k alpha_k) = i theta_r, the branch pinned by the sector m."""
        return tuple(1j * self.theta(r) for r in self.sector_indices(m))

    def sector_labels(self, m: int) -> tuple:
        """A_m = {alpha_m, ..., alpha_{m+d-1}}."""
        return tuple(self.alpha(r) for r in range(m, m + self.d))

    def index_of(self, label: complex, tol: float = LABEL_TOL) -> tuple[int, int]:
        """(k, sign) with label = sign * alpha_k, k 0-based."""
        for k, a in enumerate(self.alphas):
            if abs(label - a) <= tol:
                return k, 1
            if abs(label + a) <= tol:
                return k, -1
        raise LabelingError(f"label {label} is not in the slope set")

    def to_json(self) -> dict:
        return {"labels": [[a.real, a.imag] for a in self.alphas], "theta1": self.theta1}

    @classmethod
    def from_json(cls, data: dict) -> "SlopeData":
        return cls(tuple(complex(re, im) for re, im in data["labels"]), float(data["theta1"]))


def lift_to_zd(d: QuadGraph, alpha: EdgeLabeling, s: SlopeData, x0) -> dict:
    """P: V(D) -> Z^d with P(x0) = 0 and P(y) - P(x) = +-e_k along edges labelled +-alpha_k."""
    dim = s.d
    step = {}
    for e, v in alpha.items():
        k, sg = s.index_of(v)
        step[e] = (k, sg)
    P = {x0: (0,) * dim}
    queue = deque([x0])
    while queue:
        u = queue.popleft()
        for v in d.neighbors[u]:
            k, sg = step[(u, v)]
            n = list(P[u])
            n[k] += sg
            n = tuple(n)
            if v in P:
                if P[v] != n:
                    raise LabelingError(f"inconsistent lift at vertex {v}: {P[v]} vs {n}")
            else:
                P[v] = n
                queue.append(v)
    if len(P) != len(d.vertices):
        raise LabelingError("quad-graph is not connected")
    return P


@dataclass(frozen=True)
class Brick:
    """Box prod_k [lower_k, upper_k] in Z^d."""

    lower: tuple
    upper: tuple

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple:
        return tuple(b - a + 1 for a, b in zip(self.lower, self.upper))

    def __contains__(self, n) -> bool:
        return all(a <= x <= b for a, x, b in zip(self.lower, n, self.upper))

    def points(self):
        return product(*(range(a, b + 1) for a, b in zip(self.lower, self.upper)))

    def __len__(self):
        return int(np.prod(self.shape))


def compute_hull(points) -> Brick:
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    arr = np.array(pts, dtype=int)
    return Brick(tuple(int(x) for x in arr.min(axis=0)), tuple(int(x) for x in arr.max(axis=0)))


def hull_closure(points) -> set:
    """Literal closure under completing elementary squares with three known corners."""
    known = {tuple(p) for p in points}
    dim = len(next(iter(known)))
    queue = deque(known)
    while queue:
        n = queue.popleft()
        for j in range(dim):
            for k in range(j + 1, dim):
                for sj, sk in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    a = list(n); a[j] += sj
                    b = list(n); b[k] += sk
                    c = list(a); c[k] += sk
                    corners = [tuple(a), tuple(b), tuple(c)]
                    miss = [x for x in corners if x not in known]
                    if len(miss) == 1:
                        known.add(miss[0])
                        queue.append(miss[0])
    return known


def sector_decomposition(d: QuadGraph, alpha: EdgeLabeling, s: SlopeData, x0) -> dict:
    """U_m for m = 1..2d: vertices reachable from x0 along edges with slopes in A_m."""
    out = {}
    for m in range(1, 2 * s.d + 1):
        allowed = s.sector_labels(m)
        seen = {x0}
        queue = deque([x0])
        while queue:
            u = queue.popleft()
            for v in d.neighbors[u]:
                if v in seen:
                    continue
                lab = alpha[(u, v)]
                if any(abs(lab - a) <= LABEL_TOL for a in allowed):
                    seen.add(v)
                    queue.append(v)
        out[m] = frozenset(seen)
    return out


def octant_contains(s: SlopeData, m: int, n) -> bool:
    return all(x == 0 or (x > 0) == (e > 0) for x, e in zip(n, s.eps(m)))


def sector_of(s: SlopeData, n) -> int:
    """Smallest m in 1..2d whose octant contains n."""
    for m in range(1, 2 * s.d + 1):
        if octant_contains(s, m, n):
            return m
    raise LabelingError(f"point {n} lies in no octant S_m")
