"""Cell decompositions, quad-graph doubles, strips and the rhombic-embeddability test."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping, Sequence

Vertex = Hashable
Face = tuple


class GraphError(ValueError):
    """Malformed or non-planar combinatorial input."""


def _directed_edges(face: Sequence) -> list[tuple]:
    n = len(face)
    return [(face[i], face[(i + 1) % n]) for i in range(n)]


def _ukey(a, b) -> tuple:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class CellDecomposition:
    """Finite planar patch: vertices, bounded faces listed counterclockwise.

    The unbounded face is implicit.  ``edges`` defaults to the union of the
    face boundaries.
    """

    vertices: tuple
    faces: tuple
    positions: Mapping | None = None
    edges: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "faces", tuple(tuple(f) for f in self.faces))
        if not self.faces:
            raise GraphError("cell decomposition has no faces")
        vset = set(self.vertices)
        seen = {}
        for i, f in enumerate(self.faces):
            if len(f) < 3 or len(set(f)) != len(f):
                raise GraphError(f"face {i} is not a simple cycle: {f}")
            for a, b in _directed_edges(f):
                if a not in vset or b not in vset:
                    raise GraphError(f"face {i} references unknown vertex")
                if (a, b) in seen:
                    raise GraphError(f"directed edge {(a, b)} used by faces {seen[(a, b)]} and {i}: "
                                     "inconsistent orientation or edge in more than two faces")
                seen[(a, b)] = i
        edges = set(_ukey(a, b) for a, b in seen)
        if self.edges is not None:
            edges |= set(_ukey(a, b) for a, b in self.edges)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        if len(self.vertices) - len(self.edges) + len(self.faces) + 1 != 2:
            raise GraphError("Euler characteristic check failed: patch is not a planar disk")

    @cached_property
    def left_face(self) -> dict:
        """Directed edge -> index of the face on its left."""
        out = {}
        for i, f in enumerate(self.faces):
            for a, b in _directed_edges(f):
                out[(a, b)] = i
        return out


@dataclass(frozen=True)
class QuadGraph:
    """Bipartite quad-graph with faces ``(x0, y0, x1, y1)``, x black and y white.

    ``outer`` optionally names a white vertex standing for the unbounded face of
    a primal patch; ``origin`` maps vertex ids back to whatever they were built
    from.
    """

    black: frozenset
    white: frozenset
    faces: tuple
    positions: Mapping | None = None
    outer: Vertex | None = None
    origin: Mapping | None = None

    def __post_init__(self):
        object.__setattr__(self, "black", frozenset(self.black))
        object.__setattr__(self, "white", frozenset(self.white))
        object.__setattr__(self, "faces", tuple(tuple(f) for f in self.faces))
        if self.black & self.white:
            raise GraphError("a vertex is both black and white")
        seen = {}
        for i, f in enumerate(self.faces):
            if len(f) != 4:
                raise GraphError(f"face {i} is not a quadrilateral")
            x0, y0, x1, y1 = f
            if x0 not in self.black or x1 not in self.black or y0 not in self.white or y1 not in self.white:
                raise GraphError(f"face {i} does not alternate black/white: {f}")
            for e in _directed_edges(f):
                if e in seen:
                    raise GraphError(f"directed edge {e} appears in faces {seen[e]} and {i}")
                seen[e] = i

    @cached_property
    def vertices(self) -> tuple:
        return tuple(sorted(self.black | self.white))

    @cached_property
    def edges(self) -> tuple:
        """Undirected edges as sorted pairs."""
        return tuple(sorted({_ukey(a, b) for f in self.faces for a, b in _directed_edges(f)}))

    @cached_property
    def neighbors(self) -> dict:
        nb = defaultdict(set)
        for a, b in self.edges:
            nb[a].add(b)
            nb[b].add(a)
        return {v: tuple(sorted(nb[v])) for v in self.vertices}

    @cached_property
    def edge_faces(self) -> dict:
        """Undirected edge -> indices of incident faces."""
        out = defaultdict(list)
        for i, f in enumerate(self.faces):
            for a, b in _directed_edges(f):
                out[_ukey(a, b)].append(i)
        return dict(out)

    @cached_property
    def vertex_faces(self) -> dict:
        out = defaultdict(list)
        for i, f in enumerate(self.faces):
            for v in f:
                out[v].append(i)
        return dict(out)

    def is_interior(self, v) -> bool:
        """True if the faces around ``v`` close up into a full flower."""
        nb = self.neighbors.get(v, ())
        return bool(nb) and all(len(self.edge_faces[_ukey(v, u)]) == 2 for u in nb)

    @cached_property
    def interior(self) -> frozenset:
        return frozenset(v for v in self.vertices if self.is_interior(v))

    def subgraph(self, keep) -> "QuadGraph":
        """Faces with all four corners in ``keep``."""
        keep = set(keep)
        faces = [f for f in self.faces if all(v in keep for v in f)]
        vs = {v for f in faces for v in f}
        pos = None if self.positions is None else {v: self.positions[v] for v in vs if v in self.positions}
        return QuadGraph(self.black & vs, self.white & vs, faces, pos,
                         self.outer if self.outer in vs else None, self.origin)


def quadgraph_from_faces(faces, positions=None, black_seed=None) -> QuadGraph:
    """2-colour a list of quads by BFS and rotate each so it starts at a black vertex.

    Raises GraphError on an odd cycle.
    """
    faces = [tuple(f) for f in faces]
    if not faces:
        raise GraphError("no faces")
    nb = defaultdict(set)
    for f in faces:
        if len(f) != 4:
            raise GraphError(f"face {f} is not a quadrilateral")
        for a, b in _directed_edges(f):
            nb[a].add(b)
            nb[b].add(a)
    color = {}
    for start in sorted(nb):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in sorted(nb[u]):
                if v not in color:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    raise GraphError(f"odd cycle through edge {(u, v)}: not bipartite")
    if black_seed is not None and color[black_seed] == 1:
        color = {v: 1 - c for v, c in color.items()}
    black = {v for v, c in color.items() if c == 0}
    white = set(color) - black
    rotated = [f if f[0] in black else f[1:] + f[:1] for f in faces]
    return QuadGraph(frozenset(black), frozenset(white), rotated, positions)


def build_double(g: CellDecomposition, outer: bool = True) -> QuadGraph:
    """Quad-graph D built from G and its dual, one quad per edge pair (e, e*).

    Black vertices are ``0..|V|-1`` (sorted primal vertices), white vertices
    follow, one per bounded face, and, if ``outer``, a final one for the
    unbounded face so that boundary edges also get a quad.  For the primal edge
    ``x0 -> x1`` the face on its right is ``y0`` and the one on its left ``y1``,
    so that ``(x0, y0, x1, y1)`` is counterclockwise.
    """
    vid = {v: i for i, v in enumerate(g.vertices)}
    nv = len(vid)
    fid = {i: nv + i for i in range(len(g.faces))}
    out_id = nv + len(g.faces) if outer else None
    origin = {vid[v]: ("vertex", v) for v in g.vertices}
    origin.update({fid[i]: ("face", i) for i in fid})

    quads = []
    left = g.left_face
    for a, b in g.edges:
        yl = left.get((a, b))
        yr = left.get((b, a))
        if yl is None and yr is None:
            continue
        if yl is None or yr is None:
            if not outer:
                continue
        y1 = fid[yl] if yl is not None else out_id
        y0 = fid[yr] if yr is not None else out_id
        quads.append((vid[a], y0, vid[b], y1))
    white = set(fid.values())
    if outer and any(out_id in q for q in quads):
        white.add(out_id)
        origin[out_id] = ("outer",)
    pos = None
    if g.positions is not None:
        pos = {vid[v]: complex(g.positions[v]) for v in g.vertices}
        for i, f in enumerate(g.faces):
            pos[fid[i]] = sum(complex(g.positions[v]) for v in f) / len(f)
    return QuadGraph(frozenset(vid.values()), frozenset(white), tuple(quads), pos,
                     out_id if outer and out_id in white else None, origin)


def _chain_cycles(succ: dict) -> list | None:
    """Turn a successor map into one cycle, or None if it is an open chain."""
    if not succ:
        return None
    start = min(succ)
    cyc = [start]
    v = succ[start]
    while v != start:
        if v not in succ or len(cyc) > len(succ):
            return None
        cyc.append(v)
        v = succ[v]
    if len(cyc) != len(succ):
        return None
    return cyc


def extract_primal_dual(d: QuadGraph) -> tuple[CellDecomposition, CellDecomposition]:
    """Recover (G, G*) from D.

    Only vertices whose flower closes up give faces; the ``outer`` white
    vertex, if any, is dropped from G's faces and from G*.
    """
    primal_succ = defaultdict(dict)
    dual_succ = defaultdict(dict)
    for x0, y0, x1, y1 in d.faces:
        primal_succ[y1][x0] = x1
        primal_succ[y0][x1] = x0
        dual_succ[x0][y0] = y1
        dual_succ[x1][y1] = y0

    def faces_of(succ, centers, skip):
        out = []
        for c in sorted(centers):
            if c == skip:
                continue
            cyc = _chain_cycles(succ.get(c, {}))
            if cyc is not None and len(cyc) >= 3 and skip not in cyc:
                out.append(tuple(cyc))
        return out

    def positions_for(vs):
        if d.positions is None:
            return None
        return {v: d.positions[v] for v in vs if v in d.positions}

    gfaces = faces_of(primal_succ, d.white, d.outer)
    bl = sorted(d.black)
    g = CellDecomposition(tuple(bl), tuple(gfaces), positions_for(bl),
                          edges=tuple(_ukey(f[0], f[2]) for f in d.faces))
    wh = sorted(d.white - {d.outer})
    dfaces = faces_of(dual_succ, d.black, d.outer)
    dual_edges = tuple(_ukey(f[1], f[3]) for f in d.faces if d.outer not in (f[1], f[3]))
    gs = CellDecomposition(tuple(wh), tuple(dfaces), positions_for(wh), edges=dual_edges)
    return g, gs


@dataclass(frozen=True)
class Strip:
    """Faces ``q_j`` and traverse edges; for open strips ``len(edges) == len(faces) + 1``."""

    faces: tuple
    edges: tuple
    periodic: bool = False

    def __len__(self):
        return len(self.faces)


def _face_pair(face, pair):
    a, b, c, e = face
    return (_ukey(a, b), _ukey(c, e)) if pair == 0 else (_ukey(b, c), _ukey(e, a))


def enumerate_strips(d: QuadGraph) -> list[Strip]:
    """All maximal strips, in deterministic order (by first face, then side pair)."""
    ef = d.edge_faces
    pair_of = {}
    for i, f in enumerate(d.faces):
        for p in (0, 1):
            for e in _face_pair(f, p):
                pair_of[(i, e)] = p

    def walk(face, entry):
        # from face i entered through edge `entry`, keep leaving through the opposite side
        faces, edges = [], []
        i, e = face, entry
        while True:
            p = pair_of[(i, e)]
            e0, e1 = _face_pair(d.faces[i], p)
            out = e1 if e == e0 else e0
            faces.append((i, p))
            edges.append(out)
            nxt = [j for j in ef[out] if j != i]
            if not nxt:
                return faces, edges, False
            i, e = nxt[0], out
            if (i, pair_of[(i, e)]) == (face, pair_of[(face, entry)]):
                return faces, edges, True

    visited = set()
    strips = []
    for i, f in enumerate(d.faces):
        for p in (0, 1):
            if (i, p) in visited:
                continue
            e0, e1 = _face_pair(f, p)
            fwd, fedges, periodic = walk(i, e0)
            if periodic:
                faces, edges = fwd, [e0] + fedges[:-1]
            else:
                back, bedges, _ = walk(i, e1)
                # back[0] is (i, p) again
                faces = [x for x in reversed(back[1:])] + fwd
                edges = list(reversed(bedges)) + fedges
            visited.update(faces)
            strips.append(Strip(tuple(x[0] for x in faces), tuple(edges), periodic))
    return strips


@dataclass(frozen=True)
class EmbeddabilityReport:
    ok: bool
    reason: str = ""
    strips: tuple = ()
    faces: tuple = ()

    def __bool__(self):
        return self.ok


def check_rhombic_embeddable(d: QuadGraph) -> EmbeddabilityReport:
    """Strip criterion: no strip closes up or crosses itself, two strips cross at most once.

    On a finite patch strips end at the boundary; only that finite portion is
    inspected.  The certificate names offending strip indices (into
    ``enumerate_strips(d)``) and the faces where the crossings happen.
    """
    strips = enumerate_strips(d)
    face_strips = defaultdict(list)
    for s_idx, s in enumerate(strips):
        if s.periodic:
            return EmbeddabilityReport(False, "periodic strip", (s_idx,), s.faces)
        for fi in s.faces:
            face_strips[fi].append(s_idx)
    crossings = defaultdict(list)
    for fi in sorted(face_strips):
        ss = face_strips[fi]
        if len(ss) != 2 or ss[0] == ss[1]:
            return EmbeddabilityReport(False, "self-crossing strip", (ss[0],), (fi,))
        crossings[tuple(sorted(ss))].append(fi)
    for pair in sorted(crossings):
        if len(crossings[pair]) > 1:
            return EmbeddabilityReport(False, "strips cross more than once", pair, tuple(crossings[pair]))
    return EmbeddabilityReport(True)
