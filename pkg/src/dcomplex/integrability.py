"""3D consistency, zero curvature representations, Bäcklund transformations, isomonodromy.

Cube convention: the base x0 sits at the origin of a unit cube in Z^3 whose
edges carry the labels a0 (towards y0), a1 (towards y1) and lam (vertical,
towards x0_hat).  The ground face is (x0, y0, x1, y1).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import QuadGraph
from .labeling import EdgeLabeling, WeightFunction
from .quadeq import KINDS, DegenerateStep, cr_top, cross_ratio_top, hirota_top, residual, top


# ---------------------------------------------------------------- 3D consistency

@dataclass
class CubeReport:
    values: tuple  # three candidates for f(x1_hat)
    deviation: float  # max pairwise deviation, relative to max(1, |value|)
    closed_form: complex | np.ndarray | None = None
    closed_form_deviation: float | None = None


def _face_top(kind, f00, f10, f01, a, b, coef):
    """Top corner with labels (a, b) or, if given, an explicit face coefficient."""
    if coef is None:
        return top(kind, f00, f10, f01, a, b)
    if kind == "cr":
        return cr_top(f00, f10, f01, coef)
    if kind == "cross-ratio":
        return cross_ratio_top(f00, f10, f01, coef)
    raise ValueError("explicit coefficients are supported for 'cr' and 'cross-ratio' only")


def hirota_cube_closed_form(w_y0, w_y1, w_hx0, a0, a1, lam):
    """w(x1_hat) from w(y0), w(y1), w(x0_hat); independent of w(x0)."""
    p = lam * (a0 ** 2 - a1 ** 2)
    q = a1 * (lam ** 2 - a0 ** 2)
    r = a0 * (a1 ** 2 - lam ** 2)
    return (p * w_y0 * w_y1 + q * w_y0 * w_hx0 + r * w_y1 * w_hx0) / (p * w_hx0 + q * w_y1 + r * w_y0)


def check_3d_consistency(kind: str, f_x0, f_y0, f_y1, f_hx0, a0, a1, lam, coefficients: dict | None = None) -> CubeReport:
    """Compute f(x1_hat) three ways around the cube.

    ``lam`` is the vertical label for every kind; the cross-ratio system only
    sees lam**2.  ``coefficients`` may override the face coefficient of the
    pairs 'ab' (ground/top), 'ac' (faces over the a0 edge) and 'bc' (over
    a1): the CR factor (a+b)/(a-b) or the cross-ratio Q.  Overrides that do
    not come from labels break consistency, which is how the negative
    controls are built.  Inputs may be numpy arrays (vectorized trials).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    c = coefficients or {}
    ab, ac, bc = c.get("ab"), c.get("ac"), c.get("bc")
    f_x1 = _face_top(kind, f_x0, f_y0, f_y1, a0, a1, ab)
    f_hy0 = _face_top(kind, f_x0, f_y0, f_hx0, a0, lam, ac)
    f_hy1 = _face_top(kind, f_x0, f_y1, f_hx0, a1, lam, bc)
    v1 = _face_top(kind, f_hx0, f_hy0, f_hy1, a0, a1, ab)
    v2 = _face_top(kind, f_y1, f_x1, f_hy1, a0, lam, ac)
    v3 = _face_top(kind, f_y0, f_x1, f_hy0, a1, lam, bc)
    scale = np.maximum(1.0, np.abs(v1))
    dev = np.maximum(np.abs(v1 - v2), np.maximum(np.abs(v1 - v3), np.abs(v2 - v3))) / scale
    rep = CubeReport((v1, v2, v3), float(np.max(dev)))
    if kind == "hirota" and not c:
        cf = hirota_cube_closed_form(f_y0, f_y1, f_hx0, a0, a1, lam)
        rep.closed_form = cf
        rep.closed_form_deviation = float(np.max(np.abs(cf - v1) / scale))
    return rep


def random_cubes(kind: str, trials: int, rng: np.random.Generator, coefficients: dict | None = None) -> CubeReport:
    """Vectorized fuzz: random corner data and random unit labels."""
    def cplx(n):
        return rng.normal(size=n) + 1j * rng.normal(size=n)

    def unit(n):
        return np.exp(2j * np.pi * rng.uniform(size=n))

    f = [cplx(trials) for _ in range(4)]
    if kind == "hirota":
        f = [np.exp(0.5 * x) for x in f]  # keep away from zero
    return check_3d_consistency(kind, *f, unit(trials), unit(trials), unit(trials), coefficients)


# ---------------------------------------------------------------- transition matrices

@dataclass(frozen=True)
class TransitionMatrix:
    """L(y, x, alpha; lambda) along the directed edge x -> y."""

    kind: str
    edge: tuple
    alpha: complex
    fx: complex
    fy: complex

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "hirota" and self.fx == 0:
            raise DegenerateStep("w(x) = 0 in the Hirota transition matrix")
        if self.kind == "cross-ratio" and self.fx == self.fy:
            raise DegenerateStep("z(x) = z(y) in the cross-ratio transition matrix")

    def __call__(self, lam):
        """Matrices at the given λ samples, shape (..., 2, 2)."""
        lam = np.asarray(lam, dtype=complex)
        a, fx, fy = self.alpha, self.fx, self.fy
        out = np.empty(lam.shape + (2, 2), dtype=complex)
        if self.kind == "cr":
            out[..., 0, 0] = lam + a
            out[..., 0, 1] = -2 * a * (fx + fy)
            out[..., 1, 0] = 0
            out[..., 1, 1] = lam - a
        elif self.kind == "cross-ratio":
            dz = fx - fy
            out[..., 0, 0] = 1
            out[..., 0, 1] = dz
            out[..., 1, 0] = lam * a * a / dz
            out[..., 1, 1] = 1
        else:
            out[..., 0, 0] = 1
            out[..., 0, 1] = -a * fy
            out[..., 1, 0] = -lam * a / fx
            out[..., 1, 1] = fy / fx
        return out

    def derivative(self, lam):
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros(lam.shape + (2, 2), dtype=complex)
        if self.kind == "cr":
            out[..., 0, 0] = 1
            out[..., 1, 1] = 1
        elif self.kind == "cross-ratio":
            out[..., 1, 0] = self.alpha ** 2 / (self.fx - self.fy)
        else:
            out[..., 1, 0] = -self.alpha / self.fx
        return out


def transition_matrix(kind: str, x, y, f: dict, alpha: EdgeLabeling) -> TransitionMatrix:
    return TransitionMatrix(kind, (x, y), complex(alpha[(x, y)]), complex(f[x]), complex(f[y]))


def face_curvature(kind: str, f: dict, face, alpha: EdgeLabeling, lams) -> float:
    """Relative entrywise deviation of L(x1,y0)L(y0,x0) from L(x1,y1)L(y1,x0)."""
    x0, y0, x1, y1 = face
    L = lambda a, b: transition_matrix(kind, a, b, f, alpha)(lams)  # noqa: E731
    left = L(y0, x1) @ L(x0, y0)
    right = L(y1, x1) @ L(x0, y1)
    scale = np.maximum(1.0, np.max(np.abs(left), axis=(-2, -1)))
    return float(np.max(np.max(np.abs(left - right), axis=(-2, -1)) / scale))


def check_zero_curvature(kind: str, f: dict, d: QuadGraph, alpha: EdgeLabeling, lams, faces=None) -> float:
    """Max over faces of ``face_curvature``."""
    faces = d.faces if faces is None else faces
    return max((face_curvature(kind, f, fc, alpha, lams) for fc in faces), default=0.0)


def cr_gauge_defect(f: dict, x, y, alpha: EdgeLabeling, lams) -> float:
    """Relative |L - U(y) M U(x)^{-1}| for the CR matrices, U(v) = [[1, f(v)], [0, 1]].

    M is the affine Bäcklund matrix acting on (f_hat, 1).  The gauge must use
    +f(v); with -f(v) the (1,2) entry comes out as 2λ(f(x) - f(y)) instead.
    """
    lams = np.asarray(lams, dtype=complex)
    a = complex(alpha[(x, y)])
    fx, fy = complex(f[x]), complex(f[y])
    M = np.zeros(lams.shape + (2, 2), dtype=complex)
    M[..., 0, 0] = lams + a
    M[..., 0, 1] = (lams - a) * fx - (lams + a) * fy
    M[..., 1, 1] = lams - a
    Uy = np.array([[1, fy], [0, 1]])
    Uxinv = np.array([[1, -fx], [0, 1]])
    L = TransitionMatrix("cr", (x, y), a, fx, fy)(lams)
    return float(np.max(np.abs(L - Uy @ M @ Uxinv)) / max(1.0, float(np.max(np.abs(L)))))


def sample_lambdas(alphas, count: int | None = None, seed: int = 0, radius_factor: float = 3.0) -> np.ndarray:
    """Generic spectral samples on a circle of radius 3 max|alpha|, seeded."""
    alphas = np.asarray(alphas, dtype=complex)
    count = 2 * len(alphas) + 8 if count is None else count
    rng = np.random.default_rng(seed)
    r = radius_factor * float(np.max(np.abs(alphas)))
    return r * np.exp(2j * np.pi * rng.uniform(size=count))


# ---------------------------------------------------------------- Bäcklund

def backlund(kind: str, d: QuadGraph, f: dict, alpha: EdgeLabeling, lam: complex,
             seed_vertex, seed_value: complex, tol: float = 1e-9, dps: int = 40) -> dict:
    """Solve the vertical faces (x, y, y_hat, x_hat) outward from the seed.

    Each edge x -> y of D gives f_hat(y) = top(f(x), f(y), f_hat(x)) with
    labels alpha(x, y) and lam.  Every edge reached twice is checked; a
    mismatch above ``tol`` (relative) means f does not solve its system.
    Each step is a Möbius map whose derivative can exceed 1 in modulus, so
    rounding grows along paths like a discrete exponential; the propagation
    runs in mpmath at ``dps`` digits and only the result is rounded.
    """
    import mpmath

    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    with mpmath.workdps(dps):
        lam_mp = mpmath.mpc(lam)
        fm = {}

        def F(v):
            if v not in fm:
                fm[v] = mpmath.mpc(f[v])
            return fm[v]

        out = {seed_vertex: mpmath.mpc(seed_value)}
        queue = deque([seed_vertex])
        while queue:
            x = queue.popleft()
            for y in d.neighbors[x]:
                try:
                    val = top(kind, F(x), F(y), out[x], mpmath.mpc(alpha[(x, y)]), lam_mp)
                except ZeroDivisionError as exc:
                    raise DegenerateStep(f"vertical face over edge {(x, y)} is degenerate "
                                         "(lambda equal to an edge label?)") from exc
                if y in out:
                    if abs(val - out[y]) > tol * max(1.0, abs(val)):
                        raise ValueError(f"Bäcklund propagation inconsistent at vertex {y}: "
                                         f"{complex(out[y])} vs {complex(val)}")
                else:
                    out[y] = val
                    queue.append(y)
        return {v: complex(x) for v, x in out.items()}


# ---------------------------------------------------------------- flowers

def flower(d: QuadGraph, v) -> list:
    """Faces around an interior vertex in counterclockwise order, each rotated to start at v."""
    rot = []
    for fi in d.vertex_faces[v]:
        fc = d.faces[fi]
        i = fc.index(v)
        rot.append(fc[i:] + fc[:i])
    nxt = {fc[1]: fc for fc in rot}
    out = [rot[0]]
    while len(out) < len(rot):
        fc = nxt.get(out[-1][3])
        if fc is None or fc is out[0]:
            raise ValueError(f"vertex {v} does not have a closed flower")
        out.append(fc)
    if out[-1][3] != out[0][1]:
        raise ValueError(f"vertex {v} does not have a closed flower")
    return out


def cr_flower_defect(d: QuadGraph, nu: WeightFunction, v, mu0: complex) -> float:
    """Run mu_k = (nu_k mu_{k-1} + 1)/(nu_k - mu_{k-1}) around v; distance back to mu0."""
    mu = mu0
    for _, y0, _, y1 in flower(d, v):
        n = nu[(y0, y1)]
        mu = (n * mu + 1) / (n - mu)
    return abs(mu - mu0)


def cross_ratio_flower_defect(d: QuadGraph, alpha: EdgeLabeling, v, mu0: complex) -> float:
    """Run mu_k = mu_{k-1}/Q_k with Q_k = a0^2/a1^2 of petal k; distance back to mu0."""
    mu = mu0
    for fc in flower(d, v):
        a0, a1 = alpha.face_labels(fc)
        mu = mu / (a0 * a0 / (a1 * a1))
    return abs(mu - mu0)


# ---------------------------------------------------------------- isomonodromy on Z^d

def _lz(kind, values, labels, n, k, lam):
    """L_k(n; λ) and its λ-derivative on Z^d."""
    nk = list(n); nk[k] += 1
    f0, f1 = values[tuple(n)], values[tuple(nk)]
    a = labels[k]
    if kind == "cr":
        T = TransitionMatrix("cr", (tuple(n), tuple(nk)), a, f0, f1)
    else:
        T = TransitionMatrix("hirota", (tuple(n), tuple(nk)), a, f0, f1)
    return T(lam), T.derivative(lam)


def initial_A(kind: str, lam, gamma: float | None = None) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    A = np.zeros(lam.shape + (2, 2), dtype=complex)
    if kind == "cr":
        A[..., 0, 1] = 1 / lam
    else:
        A[..., 0, 0] = -gamma / 2 / lam
        A[..., 1, 1] = gamma / 2 / lam
    return A


def A_step(kind, A, values, labels, n, k, lam):
    """A(n + e_k) = L' L^{-1} + L A(n) L^{-1}."""
    L, dL = _lz(kind, values, labels, n, k, lam)
    Linv = np.linalg.inv(L)
    return dL @ Linv + L @ A @ Linv


def A_field(kind: str, values: np.ndarray, labels, lam, gamma: float | None = None, order: str = "last") -> dict:
    """A(n; λ) over a dense window, each point reached from n - e_k with k its last (first) nonzero index."""
    lam = np.asarray(lam, dtype=complex)
    shape = values.shape
    out = {}
    for n in np.ndindex(shape):
        if not any(n):
            out[n] = initial_A(kind, lam, gamma)
            continue
        nz = [i for i, x in enumerate(n) if x]
        k = nz[-1] if order == "last" else nz[0]
        prev = list(n); prev[k] -= 1
        out[n] = A_step(kind, out[tuple(prev)], values, labels, prev, k, lam)
    return out


def A_closed_cr(values, labels, n, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    d = len(n)
    A = np.zeros(lam.shape + (2, 2), dtype=complex)
    A[..., 0, 1] = (-1) ** sum(n) / lam
    for l in range(d):
        nl = n[l]
        if nl == 0:
            continue
        a = labels[l]
        up = list(n); up[l] += 1
        dn = list(n); dn[l] -= 1
        f, fp, fm = values[tuple(n)], values[tuple(up)], values[tuple(dn)]
        B = nl * np.array([[1, -(f + fm)], [0, 0]])
        C = nl * np.array([[0, fp + f], [0, 1]])
        A += B / (lam + a)[..., None, None] + C / (lam - a)[..., None, None]
    return A


def hirota_B(values, labels, n, l) -> np.ndarray:
    nl = n[l]
    if nl == 0:
        return np.zeros((2, 2), dtype=complex)
    a = labels[l]
    up = list(n); up[l] += 1
    dn = list(n); dn[l] -= 1
    wp, wm = values[tuple(up)], values[tuple(dn)]
    return nl / (wp + wm) * np.array([[wp, a * wp * wm], [1 / a, wm]])


def A_closed_hirota(values, labels, n, lam, gamma) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    Bs = [hirota_B(values, labels, n, l) for l in range(len(n))]
    A0 = np.array([[-gamma / 2, -sum(B[0, 1] for B in Bs)], [0, gamma / 2]], dtype=complex)
    A = A0 / lam[..., None, None]
    for l, B in enumerate(Bs):
        A = A + B / (lam - labels[l] ** -2)[..., None, None]
    return A


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


@dataclass
class IsomonodromyReport:
    kind: str
    closed_form: float = 0.0  # max relative deviation of the recursion from the closed forms
    path_independence: float = 0.0  # first vs last index recursion
    diagonal: float = 0.0  # CR only: A11, A22 sums
    sum_rule: float = 0.0  # CR only: A12^(0) + Σ (B12 + C12) = 1
    constraint: float = 0.0
    rank: float = 0.0  # Hirota only: |det B^(l)|
    trace: float = 0.0  # Hirota only: |tr B^(l) - n_l|
    initial: float = 0.0  # |A(0) - A(0; λ)|
    samples: int = 0
    points: int = 0
    extra: dict = field(default_factory=dict)

    def worst(self) -> float:
        return max(self.closed_form, self.path_independence, self.diagonal, self.sum_rule,
                   self.constraint, self.rank, self.trace, self.initial)

    def to_json(self) -> dict:
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in self.__dict__.items()}


def verify_isomonodromy(kind: str, values: np.ndarray, labels, gamma: float | None = None,
                        lams=None, seed: int = 0) -> IsomonodromyReport:
    """Compare A(n; λ) from the recursion with the closed pole forms on a dense window.

    ``values`` is the discrete log (kind 'cr') or the power w (kind 'hirota')
    on [0, N_1] x ... x [0, N_d] of an octant, with ``labels`` the step
    labels along the axes.  Closed forms involve f(n + e_l), so they are
    compared on the window shrunk by one in every direction.
    """
    from .special import constraint_residual

    if kind not in ("cr", "hirota"):
        raise ValueError("isomonodromy is verified for 'cr' and 'hirota'")
    if kind == "hirota" and gamma is None:
        raise ValueError("gamma is required for the Hirota system")
    values = np.asarray(values, dtype=complex)
    labels = [complex(a) for a in labels]
    lams = sample_lambdas(labels, seed=seed) if lams is None else np.asarray(lams, dtype=complex)
    rep = IsomonodromyReport(kind, samples=len(lams))
    A = A_field(kind, values, labels, lams, gamma, "last")
    A_alt = A_field(kind, values, labels, lams, gamma, "first")
    origin = (0,) * values.ndim
    rep.initial = float(np.max(np.abs(A[origin] - initial_A(kind, lams, gamma))))
    inner = tuple(N - 1 for N in values.shape)
    pts = list(np.ndindex(inner))
    rep.points = len(pts)
    for n in pts:
        rep.path_independence = max(rep.path_independence, _rel(A_alt[n], A[n]))
        if kind == "cr":
            target = A_closed_cr(values, labels, n, lams)
            rep.closed_form = max(rep.closed_form, _rel(A[n], target))
            a11 = sum(n[l] / (lams + labels[l]) for l in range(len(n)))
            a22 = sum(n[l] / (lams - labels[l]) for l in range(len(n)))
            rep.diagonal = max(rep.diagonal, _rel(A[n][..., 0, 0], a11), _rel(A[n][..., 1, 1], a22))
            s = (-1) ** sum(n)
            for l in range(len(n)):
                if n[l]:
                    up = list(n); up[l] += 1
                    dn = list(n); dn[l] -= 1
                    f, fp, fm = values[n], values[tuple(up)], values[tuple(dn)]
                    s += -n[l] * (f + fm) + n[l] * (fp + f)
            rep.sum_rule = max(rep.sum_rule, abs(s - 1))
        else:
            target = A_closed_hirota(values, labels, n, lams, gamma)
            rep.closed_form = max(rep.closed_form, _rel(A[n], target))
            for l in range(len(n)):
                B = hirota_B(values, labels, n, l)
                rep.rank = max(rep.rank, abs(np.linalg.det(B)) / max(1.0, np.max(np.abs(B)) ** 2))
                rep.trace = max(rep.trace, abs(np.trace(B) - n[l]))
    rep.constraint = constraint_residual(values, kind, gamma)
    return rep


def face_residuals(kind: str, f: dict, d: QuadGraph, alpha: EdgeLabeling) -> np.ndarray:
    """Multiplied-out face residuals of f on D with the labels a0 = alpha(x0,y0), a1 = alpha(x0,y1)."""
    out = np.empty(len(d.faces))
    for i, fc in enumerate(d.faces):
        x0, y0, x1, y1 = fc
        a0, a1 = alpha.face_labels(fc)
        out[i] = abs(residual(kind, f[x0], f[y0], f[x1], f[y1], a0, a1))
    return out
