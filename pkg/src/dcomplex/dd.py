"""Vectorized complex double-double arithmetic for the linear octant fill.

A value is a pair (hi, lo) of complex arrays whose real and imaginary parts
are each unevaluated sums hi + lo.  Only what the CR fill needs is here.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np

_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _add_real(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e = e + t
    s, e = _quick_two_sum(s, e)
    e = e + f
    return _quick_two_sum(s, e)


def _mul_real(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return _quick_two_sum(p, e)


def _div_real(ah, al, bh, bl):
    q1 = ah / bh
    p, e = _mul_real(bh, bl, q1, 0.0)
    rh, rl = _add_real(ah, al, -p, -e)
    q2 = rh / bh
    p, e = _mul_real(bh, bl, q2, 0.0)
    rh, rl = _add_real(rh, rl, -p, -e)
    q3 = rh / bh
    q1, q2 = _quick_two_sum(q1, q2)
    return _add_real(q1, q2, q3, 0.0)


class DD:
    """Complex double-double array (re_hi, re_lo, im_hi, im_lo)."""

    __slots__ = ("rh", "rl", "ih", "il")

    def __init__(self, rh, rl, ih, il):
        self.rh, self.rl, self.ih, self.il = rh, rl, ih, il

    @classmethod
    def zeros(cls, n):
        z = np.zeros(n)
        return cls(z.copy(), z.copy(), z.copy(), z.copy())

    def __getitem__(self, idx):
        return DD(self.rh[idx], self.rl[idx], self.ih[idx], self.il[idx])

    def __setitem__(self, idx, v: "DD"):
        self.rh[idx], self.rl[idx], self.ih[idx], self.il[idx] = v.rh, v.rl, v.ih, v.il

    def __add__(self, o: "DD") -> "DD":
        rh, rl = _add_real(self.rh, self.rl, o.rh, o.rl)
        ih, il = _add_real(self.ih, self.il, o.ih, o.il)
        return DD(rh, rl, ih, il)

    def __neg__(self) -> "DD":
        return DD(-self.rh, -self.rl, -self.ih, -self.il)

    def __sub__(self, o: "DD") -> "DD":
        return self + (-o)

    def __mul__(self, o: "DD") -> "DD":
        a = _mul_real(self.rh, self.rl, o.rh, o.rl)
        b = _mul_real(self.ih, self.il, o.ih, o.il)
        c = _mul_real(self.rh, self.rl, o.ih, o.il)
        e = _mul_real(self.ih, self.il, o.rh, o.rl)
        rh, rl = _add_real(a[0], a[1], -b[0], -b[1])
        ih, il = _add_real(c[0], c[1], e[0], e[1])
        return DD(rh, rl, ih, il)

    def conj(self) -> "DD":
        return DD(self.rh, self.rl, -self.ih, -self.il)

    def __truediv__(self, o: "DD") -> "DD":
        # x / y = x conj(y) / |y|^2
        num = self * o.conj()
        a = _mul_real(o.rh, o.rl, o.rh, o.rl)
        b = _mul_real(o.ih, o.il, o.ih, o.il)
        den = _add_real(a[0], a[1], b[0], b[1])
        rh, rl = _div_real(num.rh, num.rl, *den)
        ih, il = _div_real(num.ih, num.il, *den)
        return DD(rh, rl, ih, il)

    def to_complex(self) -> np.ndarray:
        return (self.rh + self.rl) + 1j * (self.ih + self.il)


def _real_parts(x) -> tuple[float, float]:
    """Split an mpf / Fraction / float into hi + lo doubles."""
    if isinstance(x, Fraction):
        hi = float(x)
        return hi, float(x - Fraction(hi))
    x = mpmath.mpf(x)
    hi = float(x)
    return hi, float(x - hi)


def from_values(values) -> DD:
    """Build a DD array from exact/high-precision scalars (mpc, mpf, Fraction, complex)."""
    n = len(values)
    out = DD.zeros(n)
    with mpmath.workdps(40):
        _fill(out, values)
    return out


def _fill(out: DD, values):
    for i, v in enumerate(values):
        if isinstance(v, Fraction):
            re, im = v, Fraction(0)
        else:
            v = mpmath.mpc(v)
            re, im = v.real, v.imag
        out.rh[i], out.rl[i] = _real_parts(re)
        out.ih[i], out.il[i] = _real_parts(im)
