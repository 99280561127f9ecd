"""Elementary-square equations and their dense fills over boxes in Z^d.

Conventions for a square with base value ``f00``, ``f10`` one step along the
label ``a``, ``f01`` one step along ``b`` and ``f11`` opposite to the base:

* CR:          f11 - f00 = (a + b)/(a - b) (f10 - f01)
* cross-ratio: q(f00, f10, f11, f01) = a^2/b^2
* Hirota:      f11 = f00 (a f10 - b f01)/(a f01 - b f10)

All solvers work elementwise on numpy arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

KINDS = ("cr", "cross-ratio", "hirota")


class DegenerateStep(ArithmeticError):
    """A face equation could not be solved for the unknown corner."""


def _guard(den, what):
    if not isinstance(den, np.ndarray):
        if den == 0 or not np.isfinite(complex(den)):
            raise DegenerateStep(f"vanishing denominator in {what} step")
        return
    if np.any(den == 0) or not np.all(np.isfinite(den)):
        raise DegenerateStep(f"vanishing denominator in {what} step")


def cr_coefficient(a, b):
    return (a + b) / (a - b)


def cr_top(f00, f10, f01, c):
    """f11 for the CR square with coefficient c = (a+b)/(a-b)."""
    return f00 + c * (f10 - f01)


def cross_ratio_top(z00, z10, z01, Q):
    """z11 solving q(z00, z10, z11, z01) = Q."""
    num = z01 * (z00 - z10) + Q * z10 * (z01 - z00)
    den = (z00 - z10) + Q * (z01 - z00)
    _guard(den, "cross-ratio")
    return num / den


def hirota_top(w00, w10, w01, a, b):
    den = a * w01 - b * w10
    _guard(den, "Hirota")
    return w00 * (a * w10 - b * w01) / den


def top(kind: str, f00, f10, f01, a, b):
    """Corner opposite the base for labels a (towards f10) and b (towards f01)."""
    if kind == "cr":
        return cr_top(f00, f10, f01, cr_coefficient(a, b))
    if kind == "cross-ratio":
        return cross_ratio_top(f00, f10, f01, a * a / (b * b))
    if kind == "hirota":
        return hirota_top(f00, f10, f01, a, b)
    raise ValueError(f"unknown kind {kind!r}")


def cr_solve(f00, f10, f01, f11, a, b):
    """Solve the CR square for the single corner passed as None."""
    c = cr_coefficient(a, b)
    if f11 is None:
        return f00 + c * (f10 - f01)
    if f00 is None:
        return f11 - c * (f10 - f01)
    if f10 is None:
        return f01 + (f11 - f00) / c
    if f01 is None:
        return f10 - (f11 - f00) / c
    raise ValueError("exactly one corner must be unknown")


def residual(kind: str, f00, f10, f11, f01, a, b):
    """Face residual in multiplied-out form."""
    if kind == "cr":
        return (f11 - f00) * (a - b) - (a + b) * (f10 - f01)
    if kind == "cross-ratio":
        Q = a * a / (b * b)
        return (f00 - f10) * (f11 - f01) - Q * (f10 - f11) * (f01 - f00)
    if kind == "hirota":
        return f11 * (a * f01 - b * f10) - f00 * (a * f10 - b * f01)
    raise ValueError(f"unknown kind {kind!r}")


@lru_cache(maxsize=64)
def _levels(shape: tuple, order: str):
    """Per level Σn: flat indices of points with >= 2 nonzero coordinates and their stencil."""
    d = len(shape)
    grid = np.indices(shape).reshape(d, -1).T
    strides = np.array([int(np.prod(shape[i + 1:])) for i in range(d)])
    nz = grid > 0
    keep = nz.sum(axis=1) >= 2
    pts = grid[keep]
    idx = np.flatnonzero(keep)
    nzk = nz[keep]
    if order == "first":
        j = np.argmax(nzk, axis=1)
        masked = nzk.copy()
        masked[np.arange(len(j)), j] = False
        k = np.argmax(masked, axis=1)
    elif order == "last":
        rev = nzk[:, ::-1]
        k = d - 1 - np.argmax(rev, axis=1)
        masked = nzk.copy()
        masked[np.arange(len(k)), k] = False
        j = d - 1 - np.argmax(masked[:, ::-1], axis=1)
    else:
        raise ValueError(f"unknown fill order {order!r}")
    lev = pts.sum(axis=1)
    out = []
    for s in range(2, int(lev.max(initial=1)) + 1):
        sel = lev == s
        if not np.any(sel):
            continue
        i_, j_, k_ = idx[sel], j[sel], k[sel]
        out.append((i_, j_, k_, i_ - strides[j_] - strides[k_], i_ - strides[k_], i_ - strides[j_]))
    return out


def fill_box(kind: str, axes, labels, order: str = "first") -> np.ndarray:
    """Fill the box [0, N_1] x ... x [0, N_d] from its coordinate axes.

    ``axes[k]`` holds the values at ``n e_k`` for n = 0..N_k (all sharing
    index 0); ``labels[k]`` is the step label along e_k.  Each remaining point
    n is the top corner of the square spanned at n - e_j - e_k, where (j, k)
    are the first (or last) two nonzero coordinates of n.  The result
    satisfies the face equation on every elementary square of the box up to
    rounding, by 3D consistency.
    """
    axes = [np.asarray(a, dtype=complex) for a in axes]
    shape = tuple(len(a) for a in axes)
    d = len(shape)
    lab = np.asarray(labels, dtype=complex)
    f = np.full(int(np.prod(shape)), np.nan + 0j, dtype=complex)
    strides = [int(np.prod(shape[i + 1:])) for i in range(d)]
    f[0] = axes[0][0]
    for k in range(d):
        f[np.arange(shape[k]) * strides[k]] = axes[k]
    for i_, j_, k_, mm, mk, mj in _levels(shape, order):
        a, b = lab[j_], lab[k_]
        # base n - e_j - e_k; the corner along e_j is n - e_k, along e_k is n - e_j
        f[i_] = top(kind, f[mm], f[mk], f[mj], a, b)
    return f.reshape(shape)


def fill_box_dd(kind: str, axes, labels, order: str = "first") -> np.ndarray:
    """``fill_box`` in double-double arithmetic.

    The map from axis data into the interior of an octant is badly
    conditioned in high dimension (rounding is amplified roughly
    geometrically in the level), so the fill is carried out with about 106
    significant bits.  ``axes[k]`` and ``labels[k]`` are sequences of
    mpmath/Fraction/complex scalars; the result is rounded to complex128.
    """
    import mpmath

    from .dd import DD, from_values

    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    shape = tuple(len(a) for a in axes)
    d = len(shape)
    strides = [int(np.prod(shape[i + 1:])) for i in range(d)]
    f = DD.zeros(int(np.prod(shape)))
    for k in range(d):
        f[np.arange(shape[k]) * strides[k]] = from_values(list(axes[k]))
    with mpmath.workdps(40):
        lab = [mpmath.mpc(a) for a in labels]
        pairs = [(j, k) for j in range(d) for k in range(d)]
        if kind == "cr":
            coef = [0 if j == k else (lab[j] + lab[k]) / (lab[j] - lab[k]) for j, k in pairs]
        elif kind == "cross-ratio":
            coef = [lab[j] ** 2 / lab[k] ** 2 for j, k in pairs]
        else:
            coef = [lab[j] for j, _ in pairs]
        C = from_values(coef)
        A = from_values(lab)
    for i_, j_, k_, mm, mk, mj in _levels(shape, order):
        f00, f10, f01 = f[mm], f[mk], f[mj]
        if kind == "cr":
            f[i_] = f00 + C[j_ * d + k_] * (f10 - f01)
        elif kind == "cross-ratio":
            Q = C[j_ * d + k_]
            a, b = f00 - f10, f01 - f00
            f[i_] = (f01 * a + Q * f10 * b) / (a + Q * b)
        else:
            a, b = A[j_], A[k_]
            f[i_] = f00 * (a * f10 - b * f01) / (a * f01 - b * f10)
    return f.to_complex().reshape(shape)


def fill_box_cr_dd(axes, labels, order: str = "first") -> np.ndarray:
    return fill_box_dd("cr", axes, labels, order)


def box_residual(kind: str, values: np.ndarray, labels) -> float:
    """Max face residual over all elementary squares of a dense box."""
    d = values.ndim
    worst = 0.0
    for j in range(d):
        for k in range(j + 1, d):
            if values.shape[j] < 2 or values.shape[k] < 2:
                continue
            s00 = [slice(None)] * d
            s00[j] = slice(0, -1); s00[k] = slice(0, -1)
            s10 = list(s00); s10[j] = slice(1, None)
            s01 = list(s00); s01[k] = slice(1, None)
            s11 = list(s10); s11[k] = slice(1, None)
            r = residual(kind, values[tuple(s00)], values[tuple(s10)], values[tuple(s11)],
                         values[tuple(s01)], labels[j], labels[k])
            scale = np.maximum(1.0, np.abs(values[tuple(s00)]))
            worst = max(worst, float(np.max(np.abs(r) / scale)))
    return worst
