from __future__ import annotations

import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dcomplex import integrability as integ
from dcomplex.labeling import lift_to_zd, weights_from_labeling
from dcomplex.linear import discrete_exponential
from dcomplex.nonlinear import check_hirota_solution, hirota_reduction_defect
from dcomplex.quadeq import DegenerateStep
from dcomplex.special import PowerParameters, log_sheet, power_on_quadgraph, power_w_sheet
from dcomplex.labeling import Realization, labeling_from_realization

from conftest import labeled, tiling


@pytest.mark.parametrize("kind", ["cr", "cross-ratio", "hirota"])
def test_cube_fuzz(kind):
    rep = integ.random_cubes(kind, 500, np.random.default_rng(7))
    assert rep.deviation < 1e-10


def test_hirota_cube_closed_form():
    rep = integ.random_cubes("hirota", 500, np.random.default_rng(8))
    assert rep.closed_form_deviation < 1e-10


@pytest.mark.parametrize("kind,coef", [("cr", {"ac": 0.3 + 0.2j}), ("cross-ratio", {"bc": 1.7 - 0.4j})])
def test_foreign_coefficient_breaks_consistency(kind, coef):
    rep = integ.random_cubes(kind, 200, np.random.default_rng(9), coefficients=coef)
    assert rep.deviation > 1e-3


@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi),
       st.complex_numbers(min_magnitude=0.2, max_magnitude=5), st.complex_numbers(min_magnitude=0.2, max_magnitude=5),
       st.complex_numbers(min_magnitude=0.2, max_magnitude=5), st.complex_numbers(min_magnitude=0.2, max_magnitude=5))
@settings(max_examples=60, deadline=None)
def test_hirota_cube_property(t0, t1, t2, w0, w1, w2, w3):
    a0, a1, lam = cmath.exp(1j * t0), cmath.exp(1j * t1), cmath.exp(1j * t2)
    # labels too close together make the face equations themselves singular
    if min(abs(a0 - a1), abs(a0 + a1), abs(a0 - lam), abs(a0 + lam), abs(a1 - lam), abs(a1 + lam)) < 0.05:
        return
    try:
        rep = integ.check_3d_consistency("hirota", w0, w1, w2, w3, a0, a1, lam)
    except (ZeroDivisionError, DegenerateStep):
        return
    if not np.all(np.isfinite(rep.values)) or max(abs(v) for v in rep.values) > 1e6:
        return
    assert rep.deviation < 1e-7


def test_transition_matrix_derivative():
    M = integ.TransitionMatrix("hirota", (0, 1), cmath.exp(0.4j), 1.3 - 0.2j, 0.7 + 0.5j)
    lam = np.array([0.9 + 0.3j])
    h = 1e-6
    fd = (M(lam + h) - M(lam - h)) / (2 * h)
    assert np.max(np.abs(fd - M.derivative(lam))) < 1e-8
    M = integ.TransitionMatrix("cross-ratio", (0, 1), cmath.exp(0.4j), 1.3 - 0.2j, 0.7 + 0.5j)
    fd = (M(lam + h) - M(lam - h)) / (2 * h)
    assert np.max(np.abs(fd - M.derivative(lam))) < 1e-8


def test_zero_curvature_exponential():
    t = tiling("penrose", radius=6, seed=42)
    d, alpha = labeled(t)
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    f = {v: discrete_exponential(P[v], 0.3 + 0.8j, t.slopes) for v in d.vertices}
    lams = integ.sample_lambdas(t.slopes.alphas, 16)
    assert integ.check_zero_curvature("cr", f, d, alpha, lams) < 1e-10


def test_zero_curvature_fails_on_perturbed_solution():
    t = tiling("square", radius=4)
    d, alpha = labeled(t)
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    f = {v: discrete_exponential(P[v], 0.3 + 0.8j, t.slopes) for v in d.vertices}
    f[t.base] += 1e-3
    lams = integ.sample_lambdas(t.slopes.alphas, 16)
    assert integ.check_zero_curvature("cr", f, d, alpha, lams) > 1e-5


def test_cr_gauge_equivalence():
    t = tiling("square", radius=3)
    d, alpha = labeled(t)
    f = {v: complex(v % 7, v % 3) for v in d.vertices}
    lams = integ.sample_lambdas(t.slopes.alphas)
    assert max(integ.cr_gauge_defect(f, x, y, alpha, lams) for x, y in d.edges) < 1e-14


def test_backlund_of_zero_is_exponential():
    t = tiling("dual-kagome", radius=5)
    d, alpha = labeled(t)
    z = 0.4 + 1.3j
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    out = integ.backlund("cr", d, {v: 0j for v in d.vertices}, alpha, z, t.base, 1.0)
    for v in d.vertices:
        e = discrete_exponential(P[v], z, t.slopes)
        assert abs(out[v] - e) <= 1e-10 * max(1.0, abs(e))


def test_backlund_detects_non_solution():
    t = tiling("square", radius=3)
    d, alpha = labeled(t)
    f = {v: complex(v) for v in d.vertices}
    with pytest.raises(ValueError, match="inconsistent"):
        integ.backlund("cr", d, f, alpha, 0.5 + 0.5j, t.base, 1.0)


def test_backlund_degenerate_lambda():
    t = tiling("square", radius=2)
    d, alpha = labeled(t)
    with pytest.raises(DegenerateStep):
        integ.backlund("hirota", d, {v: 1.0 for v in d.vertices}, alpha, 1j, t.base, 1.0)


def test_hirota_backlund_of_power_keeps_reduction():
    t = tiling("square", radius=6)
    d, alpha = labeled(t)
    sub, w, _, _ = power_on_quadgraph(d, t.slopes, t.base, 1, PowerParameters(1 / 3), alpha)
    sa = labeling_from_realization(sub, Realization(sub.positions))
    wh = integ.backlund("hirota", sub, w, sa, cmath.exp(0.7j), t.base, 1.0)
    assert check_hirota_solution(wh, sub, sa) < 1e-10
    assert hirota_reduction_defect(wh, sub, unit_color="black") < 1e-10


def test_flowers_close_on_generators():
    for t in (tiling("dual-kagome", radius=5), tiling("penrose", radius=6, seed=42)):
        d, alpha = labeled(t)
        nu = weights_from_labeling(d, alpha)
        for v in sorted(d.interior)[:40]:
            if v == d.outer:
                continue
            assert integ.cr_flower_defect(d, nu, v, 0.3 + 0.2j) < 1e-10
            assert integ.cross_ratio_flower_defect(d, alpha, v, 0.3 + 0.2j) < 1e-12


def test_isomonodromy_log_square():
    s = tiling("square", radius=2).slopes
    sheet = log_sheet(1, s, 5)
    rep = integ.verify_isomonodromy("cr", sheet.values, sheet.labels)
    assert rep.worst() < 1e-9


@given(st.floats(0.1, 0.9))
@settings(max_examples=8, deadline=None)
def test_isomonodromy_power_property(gamma):
    s = tiling("square", radius=2).slopes
    sheet = power_w_sheet(1, PowerParameters(gamma), s, 4)
    rep = integ.verify_isomonodromy("hirota", sheet.values, sheet.labels, gamma)
    assert rep.worst() < 1e-8


def test_isomonodromy_rejects_wrong_data():
    s = tiling("square", radius=2).slopes
    sheet = log_sheet(1, s, 4)
    vals = sheet.values.copy()
    vals[2, 2] += 1e-3
    rep = integ.verify_isomonodromy("cr", vals, sheet.labels)
    assert rep.worst() > 1e-6


def test_sample_lambdas_are_seeded():
    a = integ.sample_lambdas([1, 1j], seed=3)
    b = integ.sample_lambdas([1, 1j], seed=3)
    assert np.array_equal(a, b) and len(a) == 12
    assert np.allclose(np.abs(a), 3.0)
