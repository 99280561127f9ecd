"""Tiling documents: canonical JSON persistence of quad-graph patches and payloads.

Layout (schema version 1)::

    {
      "schema_version": 1,
      "kind": "penrose",                      # optional
      "base": 17,                             # optional, a black vertex
      "vertices": [{"id": 0, "color": "black", "position": [x, y]}, ...],
      "faces": [[x0, y0, x1, y1], ...],       # counterclockwise, x0 black
      "slopes": {"alphas": [[re, im], ...], "theta1": t},
      "functions": {"name": {"id": [re, im], ...}},     # optional
      "covering": {"sector": m, "branch_offsets": [...]}, # optional
      "pattern": {...}                                    # optional circle pattern
    }

Floats are written in their shortest round-trip form, keys sorted, so
``load(save(doc))`` reproduces the document exactly and identical inputs give
identical bytes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .graph import QuadGraph
from .labeling import LABEL_TOL, SlopeData

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    pass


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _z(pair, where) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise DocumentError(f"{where}: expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


@dataclass
class TilingDocument:
    vertices: list  # (id, color, position complex | None)
    faces: list  # 4-tuples of ids
    slopes: SlopeData
    kind: str | None = None
    base: int | None = None
    functions: dict = field(default_factory=dict)  # name -> {id: complex}
    covering: dict | None = None
    pattern: dict | None = None
    schema_version: int = SCHEMA_VERSION

    # ------------------------------------------------------------ conversion

    @classmethod
    def from_tiling(cls, t) -> "TilingDocument":
        qg = t.quadgraph
        verts = [(v, "black" if v in qg.black else "white", qg.positions.get(v)) for v in sorted(qg.vertices)]
        return cls(verts, [tuple(f) for f in qg.faces], t.slopes, t.kind, t.base)

    @classmethod
    def from_quadgraph(cls, qg: QuadGraph, slopes: SlopeData, kind=None, base=None) -> "TilingDocument":
        verts = [(v, "black" if v in qg.black else "white", (qg.positions or {}).get(v)) for v in sorted(qg.vertices)]
        return cls(verts, [tuple(f) for f in qg.faces], slopes, kind, base)

    def quadgraph(self) -> QuadGraph:
        black = frozenset(v for v, c, _ in self.vertices if c == "black")
        white = frozenset(v for v, c, _ in self.vertices if c == "white")
        pos = {v: p for v, _, p in self.vertices if p is not None}
        return QuadGraph(black, white, tuple(self.faces), pos or None)

    def positions(self) -> dict:
        return {v: p for v, _, p in self.vertices if p is not None}

    # ------------------------------------------------------------ json

    def to_json(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "vertices": [{"id": v, "color": c, **({"position": _c(p)} if p is not None else {})}
                         for v, c, p in self.vertices],
            "faces": [list(f) for f in self.faces],
            "slopes": {"alphas": [_c(a) for a in self.slopes.alphas], "theta1": self.slopes.theta1},
        }
        if self.kind is not None:
            out["kind"] = self.kind
        if self.base is not None:
            out["base"] = self.base
        if self.functions:
            out["functions"] = {name: {str(k): _c(v) for k, v in sorted(vals.items())}
                                for name, vals in self.functions.items()}
        if self.covering is not None:
            out["covering"] = self.covering
        if self.pattern is not None:
            out["pattern"] = self.pattern
        return out

    @classmethod
    def from_json(cls, data) -> "TilingDocument":
        if not isinstance(data, dict):
            raise DocumentError("top level: expected a JSON object")
        if "schema_version" not in data:
            raise DocumentError("missing field 'schema_version'")
        if data["schema_version"] != SCHEMA_VERSION:
            raise DocumentError(f"unsupported schema version {data['schema_version']!r} "
                                f"(this reader understands version {SCHEMA_VERSION})")
        for key in ("vertices", "faces", "slopes"):
            if key not in data:
                raise DocumentError(f"missing field '{key}'")
        verts = []
        for i, rec in enumerate(data["vertices"]):
            for key in ("id", "color"):
                if key not in rec:
                    raise DocumentError(f"vertices[{i}]: missing field '{key}'")
            if rec["color"] not in ("black", "white"):
                raise DocumentError(f"vertices[{i}].color: expected 'black' or 'white', got {rec['color']!r}")
            pos = _z(rec["position"], f"vertices[{i}].position") if "position" in rec else None
            verts.append((rec["id"], rec["color"], pos))
        faces = []
        for i, f in enumerate(data["faces"]):
            if not isinstance(f, list) or len(f) != 4:
                raise DocumentError(f"faces[{i}]: expected 4 vertex ids")
            faces.append(tuple(f))
        sl = data["slopes"]
        for key in ("alphas", "theta1"):
            if key not in sl:
                raise DocumentError(f"slopes: missing field '{key}'")
        slopes = SlopeData(tuple(_z(a, f"slopes.alphas[{i}]") for i, a in enumerate(sl["alphas"])), float(sl["theta1"]))
        functions = {}
        for name, vals in data.get("functions", {}).items():
            functions[name] = {int(k): _z(v, f"functions.{name}[{k}]") for k, v in vals.items()}
        doc = cls(verts, faces, slopes, data.get("kind"), data.get("base"), functions,
                  data.get("covering"), data.get("pattern"), data["schema_version"])
        doc.validate()
        return doc

    def validate(self, tol: float = LABEL_TOL) -> None:
        """Faces reference known vertices with alternating colours; positions realize the slopes."""
        color = {}
        for v, c, _ in self.vertices:
            if v in color:
                raise DocumentError(f"duplicate vertex id {v}")
            color[v] = c
        pos = self.positions()
        alphas = list(self.slopes.alphas) + [-a for a in self.slopes.alphas]
        for i, f in enumerate(self.faces):
            for v in f:
                if v not in color:
                    raise DocumentError(f"faces[{i}]: unknown vertex id {v}")
            cols = [color[v] for v in f]
            if cols[0] == cols[1] or cols[0] != cols[2] or cols[1] != cols[3]:
                raise DocumentError(f"faces[{i}]: colours do not alternate")
            if all(v in pos for v in f):
                for j in range(4):
                    e = pos[f[(j + 1) % 4]] - pos[f[j]]
                    if min(abs(e - a) for a in alphas) > tol:
                        raise DocumentError(f"faces[{i}]: edge {f[j]}->{f[(j + 1) % 4]} is not one of the slopes")
        if self.base is not None and color.get(self.base) != "black":
            raise DocumentError("base must be a black vertex")

    def __eq__(self, other):
        return isinstance(other, TilingDocument) and self.to_json() == other.to_json()


def dumps(doc: TilingDocument) -> str:
    return json.dumps(doc.to_json(), sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def loads(text: str) -> TilingDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        keys = re.findall(r'"([A-Za-z_][A-Za-z0-9_]*)"\s*:', text[: exc.pos])
        where = f" while reading field '{keys[-1]}'" if keys else ""
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}{where}") from exc
    return TilingDocument.from_json(data)


def save(doc: TilingDocument, path) -> None:
    Path(path).write_text(dumps(doc))


def load(path) -> TilingDocument:
    return loads(Path(path).read_text())
