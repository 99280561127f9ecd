from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from dcomplex.graph import (CellDecomposition, GraphError, QuadGraph, build_double, check_rhombic_embeddable,
                            enumerate_strips, extract_primal_dual, quadgraph_from_faces)
from dcomplex import tilings


def grid(nx, ny):
    vid = lambda i, j: i * (ny + 1) + j
    verts = [vid(i, j) for i in range(nx + 1) for j in range(ny + 1)]
    faces = [(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)) for i in range(nx) for j in range(ny)]
    pos = {vid(i, j): complex(i, j) for i in range(nx + 1) for j in range(ny + 1)}
    return CellDecomposition(tuple(verts), tuple(faces), pos)


def test_double_of_grid_counts():
    g = grid(3, 2)
    d = build_double(g, outer=True)
    assert len(d.faces) == len(g.edges)
    assert len(d.black) == len(g.vertices)
    assert len(d.white) == len(g.faces) + 1


def test_double_without_outer_keeps_interior_edges_only():
    g = grid(3, 3)
    d = build_double(g, outer=False)
    interior = [e for e in g.edges if (e in g.left_face) and (e[::-1] in g.left_face)]
    assert len(d.faces) == len(interior)
    assert d.outer is None


def test_every_double_face_alternates_colours():
    d = build_double(grid(4, 3))
    for x0, y0, x1, y1 in d.faces:
        assert x0 in d.black and x1 in d.black
        assert y0 in d.white and y1 in d.white


@given(st.integers(2, 5), st.integers(2, 5))
@settings(max_examples=25, deadline=None)
def test_primal_dual_round_trip(nx, ny):
    g = grid(nx, ny)
    d = build_double(g)
    g2, gs = extract_primal_dual(d)
    assert sorted(map(sorted, g2.faces)) == sorted(map(sorted, g.faces))
    assert set(g2.edges) == set(g.edges)
    # dual: one vertex per bounded face, one dual edge per interior primal edge
    assert len(gs.vertices) == nx * ny
    assert len(gs.edges) == (nx - 1) * ny + nx * (ny - 1)


def test_bad_orientation_rejected():
    with pytest.raises(GraphError):
        CellDecomposition((0, 1, 2, 3), ((0, 1, 2), (0, 1, 3)))


def test_non_disk_rejected():
    # two disjoint triangles: Euler characteristic is wrong for a disk
    with pytest.raises(GraphError):
        CellDecomposition((0, 1, 2, 3, 4, 5), ((0, 1, 2), (3, 4, 5)))


def test_strips_of_square_patch():
    t = tilings.square(4, 3)
    strips = enumerate_strips(t.quadgraph)
    lengths = sorted(len(s) for s in strips)
    assert lengths == [3] * 4 + [4] * 3
    assert not any(s.periodic for s in strips)


def test_generators_pass_strip_criterion(square10, kagome5, penrose8):
    for t in (square10, kagome5, penrose8):
        assert check_rhombic_embeddable(t.quadgraph)


def test_double_crossing_certificate():
    qg = quadgraph_from_faces([(0, 1, 2, 3), (0, 3, 2, 4)], black_seed=0)
    rep = check_rhombic_embeddable(qg)
    assert not rep
    assert rep.reason == "strips cross more than once"
    assert set(rep.strips) == {0, 1}
    assert set(rep.faces) == {0, 1}


def test_quadgraph_colouring_from_faces():
    qg = quadgraph_from_faces([(0, 1, 2, 3), (2, 1, 4, 5)], black_seed=0)
    assert qg.black == frozenset({0, 2, 4}) or qg.black == frozenset({0, 2})
    assert 0 in qg.black and 1 in qg.white


def test_subgraph_keeps_only_full_faces():
    t = tilings.square(3, 3)
    d = t.quadgraph
    keep = [v for v in d.vertices if d.positions[v].real <= 1.5 + min(p.real for p in d.positions.values())]
    sub = d.subgraph(keep)
    assert len(sub.faces) == 3


def test_penrose_rhombus_shapes(penrose8):
    d = penrose8.quadgraph
    shapes = set()
    for f in d.faces:
        p = [d.positions[v] for v in f]
        ang = abs(cmath.phase((p[1] - p[0]) / (p[3] - p[0])))
        a = round(math.degrees(min(ang, math.pi - ang)))
        shapes.add(a)
    assert shapes == {36, 72}


def test_kagome_angles(kagome5):
    d = kagome5.quadgraph
    for f in d.faces:
        p = [d.positions[v] for v in f]
        ang = abs(cmath.phase((p[1] - p[0]) / (p[3] - p[0])))
        assert min(abs(ang - math.pi / 3), abs(ang - 2 * math.pi / 3)) < 1e-9
