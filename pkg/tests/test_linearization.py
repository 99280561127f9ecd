from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dcomplex.labeling import lift_to_zd
from dcomplex.linear import check_cauchy_riemann, discrete_exponential
from dcomplex.linearization import (constant_family, discrete_antiderivative, discrete_derivative, form_closure,
                                    power_family, tangent_check)
from dcomplex.nonlinear import ClosureError

from conftest import labeled, tiling


def _exp(t, z):
    d, alpha = labeled(t)
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    return d, {v: discrete_exponential(P[v], z, t.slopes) for v in d.vertices}


def test_antiderivative_of_half_is_embedding(kagome5):
    d = kagome5.quadgraph
    root = min(d.black)
    g = discrete_antiderivative({v: 0.5 for v in d.vertices}, d, d.positions, g0=d.positions[root]).values
    assert max(abs(g[v] - d.positions[v]) for v in d.vertices) < 1e-12


@given(st.complex_numbers(min_magnitude=0.3, max_magnitude=2.5).filter(
    lambda z: min(abs(z - a) for a in (1, -1, 1j, -1j)) > 0.2))
@settings(max_examples=15, deadline=None)
def test_antiderivative_is_holomorphic_and_inverts(z):
    t = tiling("square", radius=5)
    d, f = _exp(t, z)
    scale = max(abs(v) for v in f.values())
    assert form_closure(f, d, d.positions).max() < 1e-11 * scale
    g = discrete_antiderivative(f, d, d.positions).values
    assert check_cauchy_riemann(g, d, d.positions) < 1e-10 * scale
    root = min(d.black)
    f2 = discrete_derivative(g, d, d.positions, f0=f[root], root=root)
    assert max(abs(f2[v] - f[v]) for v in d.vertices) < 1e-9 * scale


def test_derivative_ambiguity_is_black_white_constant():
    d, f = _exp(tiling("square", radius=5), 0.7 + 0.2j)
    g = discrete_antiderivative(f, d, d.positions).values
    root = min(d.black)
    f2 = discrete_derivative(g, d, d.positions, f0=f[root] + 0.3, root=root)
    for v in d.vertices:
        shift = 0.3 if v in d.black else -0.3
        assert abs(f2[v] - f[v] - shift) < 1e-12 * max(1.0, abs(f[v]))


def test_antiderivative_rejects_non_holomorphic(square10):
    d = square10.quadgraph
    f = {v: complex(v % 5) for v in d.vertices}
    with pytest.raises(ClosureError):
        discrete_antiderivative(f, d, d.positions)


def test_constant_family_has_zero_tangent():
    t = tiling("square", radius=3)
    d = t.quadgraph
    fam = constant_family({v: 1.0 for v in d.vertices})
    rep = tangent_check(fam, constant_family(dict(d.positions)), d, d.positions, richardson=False)
    assert rep.f_cr == 0 and rep.g_cr == 0 and rep.f_vs_g == 0


def test_power_family_passes_through_identity():
    t = tiling("square", radius=6)
    d, alpha = labeled(t)
    sub, wfam, zfam, _ = power_family(d, t.slopes, t.base, 1, alpha)
    w, z = wfam(0.5), zfam(0.5)
    assert max(abs(w[v] - 1) for v in sub.vertices) < 1e-14
    assert max(abs(z[v] - sub.positions[v]) for v in sub.vertices) < 1e-12


def test_tangent_to_power_family():
    t = tiling("square", radius=8)
    d, alpha = labeled(t)
    sub, wfam, zfam, _ = power_family(d, t.slopes, t.base, 1, alpha)
    rep = tangent_check(wfam, zfam, sub, sub.positions, 0.5, 1e-3, real_color="black")
    assert rep.f_cr < 1e-4 and rep.g_cr < 1e-4 and rep.f_vs_g < 5e-4
    # second order in h: halving h cuts the residual by about four
    assert 3.0 < rep.f_cr / rep.f_cr_half < 5.0
    assert 3.0 < rep.g_cr / rep.g_cr_half < 5.0
    assert rep.parity < 1e-10
