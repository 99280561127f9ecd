"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

from __future__ import annotations

import cmath
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from dcomplex import integrability as integ
from dcomplex.graph import check_rhombic_embeddable, quadgraph_from_faces
from dcomplex.labeling import (Realization, SlopeData, integrability_defect, labeling_from_realization, lift_to_zd,
                               sector_decomposition, weights_from_labeling)
from dcomplex.linear import (QuadratureConfig, box_to_mapping, discrete_exponential, integral_reconstruct,
                             laplacian_apply, random_holomorphic)
from dcomplex.nonlinear import check_hirota_solution, circle_pattern_extract, hirota_reduction_defect
from dcomplex.special import (PowerParameters, greens_function, log_axis_closed_form, log_axis_sequence,
                              log_even_value, log_sheet, power_axis_w, power_axis_w_closed, power_on_quadgraph,
                              power_w_sheet, power_z_sheet)
from dcomplex.tilings import KAGOME_SLOPES, SQUARE_SLOPES

from conftest import labeled, tiling


@pytest.fixture
def report(capsys):
    def emit(number: int, name: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail}")
        assert ok, detail
    return emit


def _sub_labeling(sub):
    return labeling_from_realization(sub, Realization(sub.positions))


def test_01_green_normalization(report):
    lines, ok = [], True
    for kind, kw in (("square", {"radius": 30}), ("penrose", {"radius": 8, "seed": 42})):
        t = tiling(kind, **kw)
        d, alpha = labeled(t)
        t0 = time.perf_counter()
        G = greens_function(d, t.slopes, t.base, alpha)
        lap = laplacian_apply({v: 2 * math.pi * g for v, g in G.items()}, weights_from_labeling(d, alpha), d)
        elapsed = time.perf_counter() - t0
        at_base = abs(lap[t.base] - 2 * math.pi)
        elsewhere = max(abs(v) for k, v in lap.items() if k != t.base)
        ok &= at_base <= 1e-9 and elsewhere <= 1e-10 and elapsed < 1.0
        lines.append(f"{kind} base {at_base:.1e} elsewhere {elsewhere:.1e} ({elapsed:.2f}s)")
    report(1, "Green's function normalization", ok, "; ".join(lines))


def test_02_axis_closed_forms(report):
    f1 = Fraction(0)
    log_ok = log_axis_sequence(50, f1, exact=True) == log_axis_closed_form(50, f1, exact=True)
    f = log_axis_sequence(4, f1, exact=True)
    log_ok &= f[2] == 2 and f[4] == Fraction(8, 3)
    pow_ok = True
    for gamma in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
        w1 = Fraction(1)
        pow_ok &= power_axis_w(50, gamma, w1, exact=True) == power_axis_w_closed(50, gamma, w1, exact=True)
    half = power_axis_w(50, Fraction(1, 2), Fraction(1), exact=True) == [1] * 51
    report(2, "axis closed forms", log_ok and pow_ok and half,
           f"log exact={log_ok}, power exact (1/3,1/2,2/3)={pow_ok}, w=1 at 1/2={half}")


def test_03_asymptotic_constant(report):
    n = 10 ** 5
    t0 = time.perf_counter()
    value = log_even_value(n) - math.log(2 * n)
    elapsed = time.perf_counter() - t0
    with mpmath.workdps(30):
        oracle = 2 * mpmath.harmonic(2 * n) - mpmath.harmonic(n) - mpmath.log(2 * n)
        limit = mpmath.log(2) + mpmath.euler
    err = abs(value - float(limit))
    route = abs(value - float(oracle))
    report(3, "asymptotic constant", err <= 1e-4 and route <= 1e-12 and elapsed < 1.0,
           f"f_2n - log 2n = {value:.10f}, |. - (log 2 + euler)| = {err:.1e}, vs harmonic oracle {route:.1e} "
           f"({elapsed:.3f}s)")


def test_04_cube_fuzz(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    devs = {k: integ.random_cubes(k, 1000, rng).deviation for k in ("cr", "cross-ratio", "hirota")}
    elapsed = time.perf_counter() - t0
    ok = max(devs.values()) <= 1e-10 and elapsed < 5.0
    report(4, "3D consistency fuzz", ok, ", ".join(f"{k} {v:.1e}" for k, v in devs.items()) + f" ({elapsed:.2f}s)")


def test_05_zero_curvature(report):
    t = tiling("square", radius=10)
    d, alpha = labeled(t)
    lams = integ.sample_lambdas(t.slopes.alphas, 16, seed=5)
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    exp = {v: discrete_exponential(P[v], 0.6 + 0.3j, t.slopes) for v in d.vertices}
    cr = integ.check_zero_curvature("cr", exp, d, alpha, lams)
    ident = integ.check_zero_curvature("cross-ratio", dict(d.positions), d, alpha, lams)
    # the power function lives on the sectors; together they cover every face
    hir, covered = 0.0, set()
    for m in range(1, 2 * t.slopes.d + 1):
        sub, w, _, _ = power_on_quadgraph(d, t.slopes, t.base, m, PowerParameters(1 / 3), alpha)
        hir = max(hir, integ.check_zero_curvature("hirota", w, sub, _sub_labeling(sub), lams))
        covered |= set(sub.faces)
    all_faces = covered >= set(d.faces)
    ok = max(cr, ident, hir) <= 1e-10 and all_faces
    report(5, "zero curvature", ok,
           f"CR exp {cr:.1e}, cross-ratio identity {ident:.1e}, Hirota power {hir:.1e}, all faces={all_faces}")


def test_06_isomonodromy(report):
    kag = SlopeData.from_labels(KAGOME_SLOPES)
    sheet = log_sheet(1, kag, 6)
    log_rep = integ.verify_isomonodromy("cr", sheet.values, sheet.labels, seed=1)
    sq = SlopeData.from_labels(SQUARE_SLOPES)
    psheet = power_w_sheet(1, PowerParameters(1 / 3), sq, 6)
    pow_rep = integ.verify_isomonodromy("hirota", psheet.values, psheet.labels, 1 / 3, seed=1)
    structure = max(log_rep.closed_form, log_rep.path_independence, log_rep.diagonal, log_rep.sum_rule,
                    pow_rep.closed_form, pow_rep.path_independence, pow_rep.rank, pow_rep.trace)
    constraints = max(log_rep.constraint, pow_rep.constraint)
    ok = structure <= 1e-8 and constraints <= 1e-10 and log_rep.samples == 14 and pow_rep.samples == 12
    report(6, "isomonodromy", ok,
           f"log [0,6]^3 closed form {log_rep.closed_form:.1e}, power [0,6]^2 closed form {pow_rep.closed_form:.1e}, "
           f"constraints {constraints:.1e}")


def test_07_reconstruction(report):
    s = SlopeData.from_labels(KAGOME_SLOPES)
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    errs = [integral_reconstruct(box_to_mapping(random_holomorphic((5, 5, 5), s, rng)), s, QuadratureConfig()).error
            for _ in range(20)]
    elapsed = time.perf_counter() - t0
    report(7, "integral representation", max(errs) <= 1e-6 and elapsed < 10.0,
           f"20 functions on [0,4]^3, max error {max(errs):.1e} ({elapsed:.2f}s)")


def test_08_tangent(report):
    s = SlopeData.from_labels(SQUARE_SLOPES)
    L = log_sheet(1, s, 8).values

    def err(h):
        wp = power_w_sheet(1, PowerParameters(0.5 + h), s, 8).values
        wm = power_w_sheet(1, PowerParameters(0.5 - h), s, 8).values
        return float(np.max(np.abs(np.log(wp / wm) / (2 * h) / 2 - L)))

    e3, e4 = err(1e-3), err(1e-4)
    ratio = e3 / e4
    ok = e4 <= 1e-6 and 50 < ratio < 200
    report(8, "tangent at gamma 1/2", ok, f"error {e3:.1e} at h=1e-3, {e4:.1e} at h=1e-4, ratio {ratio:.0f} (h^2 -> 100)")


def test_09_backlund(report):
    t = tiling("penrose", radius=8, seed=42)
    d, alpha = labeled(t)
    z = 0.4 + 1.3j
    P = lift_to_zd(d, alpha, t.slopes, t.base)
    out = integ.backlund("cr", d, {v: 0j for v in d.vertices}, alpha, z, t.base, 1.0)
    exp_err = max(abs(out[v] - discrete_exponential(P[v], z, t.slopes)) / max(1.0, abs(out[v]))
                  for v in d.vertices)

    sq = tiling("square", radius=8)
    ds, als = labeled(sq)
    sub, w, zz, _ = power_on_quadgraph(ds, sq.slopes, sq.base, 1, PowerParameters(1 / 3), als)
    sa = _sub_labeling(sub)
    circle_pattern_extract(zz, sub, sa)  # w comes from a genuine circle pattern
    wh = integ.backlund("hirota", sub, w, sa, cmath.exp(0.7j), sq.base, 1.0)
    red = hirota_reduction_defect(wh, sub, unit_color="black")
    hres = check_hirota_solution(wh, sub, sa)
    ok = exp_err <= 1e-10 and red <= 1e-10 and hres <= 1e-10
    report(9, "Bäcklund transformations", ok,
           f"zero -> e(.;z) {exp_err:.1e} (Penrose r8); Hirota reduction {red:.1e}, residual {hres:.1e}")


def test_10_embeddability_gate(report):
    gens = {}
    for kind, kw in (("square", {"size": 10}), ("dual-kagome", {"radius": 5}), ("penrose", {"radius": 8, "seed": 42})):
        t = tiling(kind, **kw)
        d, alpha = labeled(t)
        gens[kind] = bool(check_rhombic_embeddable(d)) and \
            integrability_defect(weights_from_labeling(d, alpha), d) <= 1e-10
    bad = check_rhombic_embeddable(quadgraph_from_faces([(0, 1, 2, 3), (0, 3, 2, 4)], black_seed=0))
    cert = (not bad) and bad.reason == "strips cross more than once" and set(bad.faces) == {0, 1} \
        and len(bad.strips) == 2
    report(10, "embeddability gate", all(gens.values()) and cert,
           f"generators {gens}; counterexample rejected: {bad.reason!r}, strips {bad.strips}, faces {bad.faces}")
