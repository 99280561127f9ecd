from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from dcomplex import dd
from dcomplex.quadeq import (DegenerateStep, box_residual, cr_solve, fill_box, fill_box_dd, residual, top)

cplx = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)
unit = st.floats(0, 2 * math.pi).map(lambda t: cmath.exp(1j * t))


def _dd_of(z):
    return dd.from_values([mpmath.mpc(z)])


def _as_mp(x: dd.DD):
    with mpmath.workdps(40):
        return mpmath.mpc(mpmath.mpf(x.rh[0]) + mpmath.mpf(x.rl[0]), mpmath.mpf(x.ih[0]) + mpmath.mpf(x.il[0]))


@given(cplx, cplx)
@settings(max_examples=60)
def test_dd_arithmetic_against_mpmath(a, b):
    with mpmath.workdps(40):
        ma, mb = mpmath.mpc(a) / 3, mpmath.mpc(b) / 7  # values that are not doubles
        x, y = dd.from_values([ma]), dd.from_values([mb])
        for got, want in ((x + y, ma + mb), (x - y, ma - mb), (x * y, ma * mb), (x / y, ma / mb)):
            err = abs(_as_mp(got) - want) / max(abs(want), mpmath.mpf(1e-300))
            assert err < 1e-29


def test_dd_keeps_low_parts():
    with mpmath.workdps(40):
        v = mpmath.mpf(1) / 3
    x = dd.from_values([v])
    assert x.rl[0] != 0
    assert abs(x.to_complex()[0] - 1 / 3) < 1e-16


@pytest.mark.parametrize("kind", ["cr", "cross-ratio", "hirota"])
@given(cplx, cplx, cplx, unit, unit)
@settings(max_examples=40)
def test_top_solves_face(kind, f00, f10, f01, a, b):
    assume(min(abs(a - b), abs(a + b)) > 1e-2)
    try:
        f11 = top(kind, f00, f10, f01, a, b)
    except DegenerateStep:
        return
    assume(abs(f11) < 1e6)
    scale = max(1.0, abs(f00), abs(f10), abs(f01), abs(f11)) ** 2 * 10
    assert abs(residual(kind, f00, f10, f11, f01, a, b)) < 1e-10 * scale


@given(cplx, cplx, cplx, unit, unit, st.integers(0, 3))
@settings(max_examples=60)
def test_cr_solve_any_corner(f00, f10, f01, a, b, miss):
    assume(min(abs(a - b), abs(a + b)) > 1e-2)
    f11 = top("cr", f00, f10, f01, a, b)
    corners = [f00, f10, f01, f11]
    want = corners[miss]
    corners[miss] = None
    got = cr_solve(*corners, a, b)
    assert abs(got - want) < 1e-9 * max(1, abs(want), abs(f11))


def test_degenerate_hirota_step():
    with pytest.raises(DegenerateStep):
        top("hirota", 1.0, 1.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("kind", ["cr", "cross-ratio", "hirota"])
def test_dd_fill_agrees_with_double_fill(kind):
    rng = np.random.default_rng(0)
    labels = [cmath.exp(1j * t) for t in (0.1, 1.2, 2.3)]
    axes = []
    start = 1.0 + 0.5j
    for _ in labels:
        ax = start + 0.3 * (rng.normal(size=4) + 1j * rng.normal(size=4))
        ax[0] = start
        axes.append(list(ax))
    a = fill_box(kind, axes, labels)
    b = fill_box_dd(kind, axes, labels)
    assert np.max(np.abs(a - b)) < 1e-8 * np.max(np.abs(b))
    assert box_residual(kind, b, labels) < 1e-12 * max(1, np.max(np.abs(b))) ** 2


def test_fill_order_independence():
    labels = [1, cmath.exp(1.1j)]
    axes = [[0, 1, 2, 3], [0, 0.5j, 1j, 1.5j + 0.2]]
    a = fill_box_dd("cr", axes, labels, "first")
    b = fill_box_dd("cr", axes, labels, "last")
    assert np.max(np.abs(a - b)) < 1e-14
