"""Discrete logarithm, Green's function and discrete power functions on the covering of octants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .graph import QuadGraph
from .labeling import EdgeLabeling, Realization, SlopeData, labeling_from_realization, lift_to_zd, octant_contains, sector_of
from .linear import AxisData, LatticeFunction
from .quadeq import DegenerateStep, fill_box_cr_dd, fill_box_dd


@dataclass(frozen=True)
class CoveringPoint:
    """Point n of the octant S_m on sheet m (m is kept unreduced)."""

    m: int
    n: tuple

    def check(self, s: SlopeData):
        if len(self.n) != s.d or not octant_contains(s, self.m, self.n):
            raise ValueError(f"{self.n} does not lie in the octant of sheet {self.m}")


@dataclass(frozen=True)
class PowerParameters:
    gamma: float
    rho: tuple | None = None  # phases rho_k; None means the canonical (2γ-1) log(eps_k alpha_k)

    def __post_init__(self):
        if not 0 < float(self.gamma) < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")


# ---------------------------------------------------------------- axis data

def log_axis_sequence(N: int, f1, exact: bool = False) -> list:
    """f_0..f_N from n (f_{n+1} - f_{n-1}) = 1 - (-1)^n, f_0 = 0."""
    f = [Fraction(0) if exact else 0.0] * (N + 1)
    if N >= 1:
        f[1] = f1
    for n in range(1, N):
        inc = Fraction(1 - (-1) ** n, n) if exact else (1 - (-1) ** n) / n
        f[n + 1] = f[n - 1] + inc
    return f


def log_axis_closed_form(N: int, f1, exact: bool = False) -> list:
    """f_{2n} = Σ_{l<=n} 2/(2l-1), f_{2n+1} = f_1."""
    out = []
    acc = Fraction(0) if exact else 0.0
    for idx in range(N + 1):
        if idx % 2:
            out.append(f1)
        else:
            if idx:
                l = idx // 2
                acc += Fraction(2, 2 * l - 1) if exact else 2.0 / (2 * l - 1)
            out.append(acc)
    return out


def log_even_value(n: int) -> float:
    """f_{2n} summed in compensated arithmetic."""
    return math.fsum(2.0 / (2 * l - 1) for l in range(1, n + 1))


def discrete_log_axes(m: int, s: SlopeData, N: int) -> AxisData:
    if N < 1:
        raise ValueError("depth must be at least 1")
    logs = s.branch_logs(m)
    return AxisData([np.array(log_axis_sequence(N, lg), dtype=complex) for lg in logs], s.eps(m))


def power_axis_w(N: int, gamma, w1, exact: bool = False) -> list:
    """w_0..w_N from n (w_{n+1} - w_{n-1})/(w_{n+1} + w_{n-1}) = (γ - 1/2)(1 - (-1)^n), w_0 = 1.

    Of the two roots of the underlying quadratic we keep this one; the other,
    w_{n+1} = -w_{n-1}, is excluded by requiring w_{n+1} + w_{n-1} != 0.
    """
    one = Fraction(1) if exact else 1.0
    half = Fraction(1, 2) if exact else 0.5
    w = [one] * (N + 1)
    if N >= 1:
        w[1] = w1
    for n in range(1, N):
        r = (gamma - half) * (1 - (-1) ** n) / n
        if r == 1:
            raise DegenerateStep("power axis recursion hits a vanishing denominator")
        w[n + 1] = w[n - 1] * (1 + r) / (1 - r)
    return w


def power_axis_w_closed(N: int, gamma, w1, exact: bool = False) -> list:
    out = []
    acc = Fraction(1) if exact else 1.0
    for idx in range(N + 1):
        if idx % 2:
            out.append(w1)
        else:
            if idx:
                l = idx // 2
                acc = acc * (l - 1 + gamma) / (l - gamma)
            out.append(acc)
    return out


def power_axis_z(N: int, gamma: float, z1: complex) -> np.ndarray:
    """z_0..z_N from n (z_{n+1}-z_n)(z_n-z_{n-1})/(z_{n+1}-z_{n-1}) = γ z_n, z_0 = 0."""
    z = np.zeros(N + 1, dtype=complex)
    if N >= 1:
        z[1] = z1
    for n in range(1, N):
        a = z[n] - z[n - 1]
        den = n * a - gamma * z[n]
        if den == 0:
            raise DegenerateStep("z_{n+1} = z_{n-1} in the power axis recursion")
        z[n + 1] = z[n] + gamma * z[n] * a / den
    return z


# ---------------------------------------------------------------- sheets

class Sheet:
    """Values of a special function on a finite window of the octant S_m.

    ``values[i_1, ..., i_d]`` is the value at n = (eps_1 i_1, ..., eps_d i_d).
    """

    def __init__(self, m: int, s: SlopeData, values: np.ndarray, kind: str, gamma: float | None = None):
        self.m = m
        self.s = s
        self.values = values
        self.kind = kind
        self.gamma = gamma
        self.eps = s.eps(m)
        self.labels = s.signed_labels(m)

    @property
    def shape(self):
        return self.values.shape

    def __getitem__(self, n):
        if not octant_contains(self.s, self.m, n):
            raise ValueError(f"{n} does not lie in the octant of sheet {self.m}")
        idx = tuple(abs(int(x)) for x in n)
        if any(i >= N for i, N in zip(idx, self.shape)):
            raise IndexError(f"{n} is outside the computed window {self.shape}")
        return complex(self.values[idx])

    def mapping(self) -> dict:
        return {tuple(int(e * i) for e, i in zip(self.eps, idx)): complex(v) for idx, v in np.ndenumerate(self.values)}


def _shape(depth, d):
    if isinstance(depth, int):
        return (depth + 1,) * d
    return tuple(int(x) + 1 for x in depth)


def _mp_sector_data(m: int, s: SlopeData):
    """Signed labels and their logarithms on sheet m, mutually consistent to 40 digits.

    theta_r is pinned by theta_1 and the stored slopes; unit labels are then
    rebuilt as exp(i theta_r) so that label and branch agree exactly.
    """
    with mpmath.workdps(40):
        a0 = mpmath.mpc(s.alphas[0])
        labels, logs = [], []
        for r in s.sector_indices(m):
            q, kk = divmod(r - 1, s.d)
            ak = mpmath.mpc(s.alphas[kk])
            th = mpmath.mpf(s.theta1) + ((mpmath.arg(ak) - mpmath.arg(a0)) % (2 * mpmath.pi)) + q * mpmath.pi
            mod = abs(ak)
            if abs(mod - 1) < 1e-12:
                mod = mpmath.mpf(1)
            labels.append(mod * mpmath.expj(th))
            logs.append(mpmath.log(mod) + 1j * th)
    return labels, logs


def log_sheet(m: int, s: SlopeData, depth, order: str = "first") -> Sheet:
    """Discrete logarithm on [0, depth]^d of the octant S_m, filled from the axes by CR steps.

    The fill runs in double-double precision (see ``fill_box_cr_dd``).
    """
    shape = _shape(depth, s.d)
    labels, logs = _mp_sector_data(m, s)
    axes = [log_axis_sequence(N - 1, lg, exact=True) if N > 1 else [Fraction(0)]
            for N, lg in zip(shape, logs)]
    return Sheet(m, s, fill_box_cr_dd(axes, labels, order), "log")


def discrete_log(point: CoveringPoint, s: SlopeData) -> complex:
    point.check(s)
    sheet = log_sheet(point.m, s, tuple(abs(x) for x in point.n))
    return sheet[point.n]


def _power_axes(m: int, params: PowerParameters, s: SlopeData, shape, which: str):
    """Axis sequences of w (which='w') or z (which='z') at 40 digits, plus the signed labels."""
    labels, logs = _mp_sector_data(m, s)
    with mpmath.workdps(40):
        g = mpmath.mpf(params.gamma)
        if params.rho is not None:
            w1 = [mpmath.expj(mpmath.mpf(r)) for r in params.rho]
        else:
            w1 = [mpmath.exp((2 * g - 1) * lg) for lg in logs]
        axes = []
        for N, a, lab in zip(shape, w1, labels):
            if which == "w":
                axes.append(power_axis_w(N - 1, g, a) if N > 1 else [mpmath.mpc(1)])
            else:
                z = [mpmath.mpc(0)] * N
                if N > 1:
                    z[1] = a * lab
                for n in range(1, N - 1):
                    step = z[n] - z[n - 1]
                    den = n * step - g * z[n]
                    if den == 0:
                        raise DegenerateStep("z_{n+1} = z_{n-1} in the power axis recursion")
                    z[n + 1] = z[n] + g * z[n] * step / den
                axes.append(z)
    return axes, labels


def power_w_sheet(m: int, params: PowerParameters, s: SlopeData, depth, order: str = "first") -> Sheet:
    """w^{2γ-1} on [0, depth]^d of S_m: w(0) = 1, w(eps_k e_k) = (eps_k alpha_k)^{2γ-1}, Hirota fill."""
    shape = _shape(depth, s.d)
    axes, labels = _power_axes(m, params, s, shape, "w")
    return Sheet(m, s, fill_box_dd("hirota", axes, labels, order), "power-w", params.gamma)


def power_z_sheet(m: int, params: PowerParameters, s: SlopeData, depth, order: str = "first") -> Sheet:
    """z^{2γ} on [0, depth]^d of S_m: z(0) = 0, z(eps_k e_k) = (eps_k alpha_k)^{2γ}, cross-ratio fill."""
    shape = _shape(depth, s.d)
    axes, labels = _power_axes(m, params, s, shape, "z")
    return Sheet(m, s, fill_box_dd("cross-ratio", axes, labels, order), "power-z", params.gamma)


def z_from_w_sheet(w: Sheet) -> np.ndarray:
    """Integrate z(n + e_k) - z(n) = w(n) w(n + e_k) beta_k over the window, z(0) = 0."""
    vals = w.values
    d = vals.ndim
    z = np.zeros_like(vals)
    for idx in np.ndindex(vals.shape):
        if not any(idx):
            continue
        k = max(i for i, x in enumerate(idx) if x)
        prev = list(idx); prev[k] -= 1
        prev = tuple(prev)
        z[idx] = z[prev] + vals[prev] * vals[idx] * w.labels[k]
    return z


def discrete_power_w(point: CoveringPoint, params: PowerParameters, s: SlopeData) -> complex:
    point.check(s)
    return power_w_sheet(point.m, params, s, tuple(abs(x) for x in point.n))[point.n]


def discrete_power_z(point: CoveringPoint, params: PowerParameters, s: SlopeData) -> complex:
    point.check(s)
    return power_z_sheet(point.m, params, s, tuple(abs(x) for x in point.n))[point.n]


# ---------------------------------------------------------------- constraints

def constraint_residual(values: np.ndarray, kind: str, gamma: float | None = None) -> float:
    """Max isomonodromic-constraint residual over window points with all forward neighbours.

    ``values`` is a dense octant window in flipped coordinates (as in
    ``Sheet.values``).  Terms with n_l = 0 carry the factor n_l and are
    dropped, so only forward neighbours are required there.
    """
    vals = np.asarray(values)
    d = vals.ndim
    inner = tuple(slice(0, N - 1) for N in vals.shape)
    core = vals[inner]
    n = np.indices(core.shape)
    parity = 1 - (-1.0) ** n.sum(axis=0)
    acc = np.zeros(core.shape, dtype=complex)
    for l in range(d):
        plus = [slice(0, N - 1) for N in vals.shape]
        plus[l] = slice(1, vals.shape[l])
        fp = vals[tuple(plus)]
        minus = np.empty_like(core)
        minus[...] = np.nan
        src = [slice(0, N - 1) for N in vals.shape]
        src[l] = slice(0, vals.shape[l] - 2)
        dst = [slice(None)] * d
        dst[l] = slice(1, None)
        minus[tuple(dst)] = vals[tuple(src)]
        nl = n[l]
        with np.errstate(invalid="ignore", divide="ignore"):
            if kind == "cr":
                term = nl * (fp - minus)
            elif kind == "hirota":
                term = nl * (fp - minus) / (fp + minus)
            elif kind == "cross-ratio":
                term = nl * (fp - core) * (core - minus) / (fp - minus)
            else:
                raise ValueError(f"unknown kind {kind!r}")
        acc += np.where(nl == 0, 0, term)
    if kind == "cr":
        res = acc - parity
    elif kind == "hirota":
        res = acc - (gamma - 0.5) * parity
    else:
        res = acc - gamma * core
    return float(np.max(np.abs(res))) if res.size else 0.0


# ---------------------------------------------------------------- on the quad-graph

def _sheet_windows(P: dict, s: SlopeData, vertices) -> dict:
    """Assign each vertex its first sheet m in 1..2d and size the windows."""
    assign = {}
    depth = {}
    for v in vertices:
        n = P[v]
        m = sector_of(s, n)
        assign[v] = m
        cur = depth.get(m, [0] * s.d)
        depth[m] = [max(c, abs(x)) for c, x in zip(cur, n)]
    return assign, depth


def log_on_quadgraph(d: QuadGraph, s: SlopeData, x0, alpha: EdgeLabeling | None = None, vertices=None) -> tuple[dict, dict]:
    """Discrete log pulled back through the lift; returns (values, sheet index per vertex)."""
    if alpha is None:
        alpha = labeling_from_realization(d, Realization(d.positions))
    P = lift_to_zd(d, alpha, s, x0)
    vertices = d.vertices if vertices is None else vertices
    assign, depth = _sheet_windows(P, s, vertices)
    sheets = {m: log_sheet(m, s, tuple(dep)) for m, dep in depth.items()}
    return {v: sheets[assign[v]][P[v]] for v in vertices}, assign


def greens_function(d: QuadGraph, s: SlopeData, x0, alpha: EdgeLabeling | None = None, raw: bool = False) -> LatticeFunction:
    """log/(2π) on the black vertices (its Laplacian is 1 at x0 and 0 elsewhere)."""
    if x0 not in d.black:
        raise ValueError("the base vertex must be black")
    vals, _ = log_on_quadgraph(d, s, x0, alpha, sorted(d.black))
    scale = 1.0 if raw else 1.0 / (2 * math.pi)
    return LatticeFunction({v: float(np.real(z)) * scale for v, z in vals.items()})


def power_on_quadgraph(d: QuadGraph, s: SlopeData, x0, m: int, params: PowerParameters,
                       alpha: EdgeLabeling | None = None) -> tuple[QuadGraph, dict, dict, dict]:
    """Restrict w^{2γ-1} and z^{2γ} of sheet m to the sector U_m of D.

    Returns (sub-quad-graph of faces inside U_m, w, z, lift).
    """
    if alpha is None:
        alpha = labeling_from_realization(d, Realization(d.positions))
    P = lift_to_zd(d, alpha, s, x0)
    keep = [v for v in d.vertices if octant_contains(s, m, P[v])]
    sub = d.subgraph(keep)
    depth = [0] * s.d
    for v in sub.vertices:
        depth = [max(a, abs(b)) for a, b in zip(depth, P[v])]
    ws = power_w_sheet(m, params, s, tuple(depth))
    zs = power_z_sheet(m, params, s, tuple(depth))
    w = {v: ws[P[v]] for v in sub.vertices}
    z = {v: zs[P[v]] for v in sub.vertices}
    return sub, w, z, {v: P[v] for v in sub.vertices}
