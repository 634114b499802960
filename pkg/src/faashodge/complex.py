"""Oriented 2-dimensional cell complexes built from service-graph documents.

Vertices are functions, oriented edges are invocations and faces are sagas.
A face boundary is a signed edge sequence; sign ``+1`` traverses the edge
tail-to-head, ``-1`` traverses it head-to-tail.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence

import numpy as np


class ComplexError(ValueError):
    """Invalid graph document. ``cell_id`` names the offending cell."""

    def __init__(self, message: str, cell_id: str | None = None):
        super().__init__(message)
        self.cell_id = cell_id


class Vertex(NamedTuple):
    id: str
    label: str = ""


class Edge(NamedTuple):
    id: str
    tail: str
    head: str
    label: str = ""
    tags: tuple[str, ...] = ()


class Face(NamedTuple):
    id: str
    boundary: tuple[tuple[str, int], ...]
    label: str = ""


@dataclass(frozen=True)
class CellComplex:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...] = ()
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edges]

    def face_ids(self) -> list[str]:
        return [f.id for f in self.faces]

    def cell_ids(self, k: int) -> list[str]:
        return [self.vertex_ids, self.edge_ids, self.face_ids][k]()

    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    def vertex_index(self) -> dict[str, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    def edges_tagged(self, tag: str) -> list[str]:
        return [e.id for e in self.edges if tag in e.tags]

    def to_document(self) -> dict:
        doc: dict[str, Any] = dict(self.meta)
        doc["vertices"] = [{"id": v.id, "label": v.label} for v in self.vertices]
        doc["edges"] = []
        for e in self.edges:
            item: dict[str, Any] = {"id": e.id, "tail": e.tail, "head": e.head, "label": e.label}
            if e.tags:
                item["tags"] = list(e.tags)
            doc["edges"].append(item)
        doc["faces"] = [
            {
                "id": f.id,
                "boundary": [{"edge": eid, "sign": s} for eid, s in f.boundary],
                "label": f.label,
            }
            for f in self.faces
        ]
        return doc


@dataclass(frozen=True)
class IncidenceMatrices:
    """Signed vertex-edge (``B1``) and edge-face (``B2``) incidence matrices."""

    B1: np.ndarray
    B2: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        n, m = self.B1.shape
        return n, m, self.B2.shape[1]


def _require_id(item: Mapping, kind: str, pos: int) -> str:
    if not isinstance(item, Mapping) or "id" not in item:
        raise ComplexError(f"{kind} #{pos} has no id")
    return str(item["id"])


def _check_unique(ids: Sequence[str], kind: str) -> None:
    seen: set[str] = set()
    for cid in ids:
        if cid in seen:
            raise ComplexError(f"duplicate {kind} id: {cid}", cid)
        seen.add(cid)


def build_complex(spec: Mapping[str, Any]) -> CellComplex:
    """Validate a graph document and return the complex in document order.

    Raises
    ------
    ComplexError
        On duplicate ids, dangling references, self-loop edges, repeated
        edges inside one face boundary, and boundaries that do not close.
    """
    raw_vertices = spec.get("vertices") or []
    raw_edges = spec.get("edges") or []
    raw_faces = spec.get("faces") or []

    vertices = tuple(
        Vertex(_require_id(v, "vertex", i), str(v.get("label", "")))
        for i, v in enumerate(raw_vertices)
    )
    _check_unique([v.id for v in vertices], "vertex")
    vids = {v.id for v in vertices}

    edges = []
    for i, e in enumerate(raw_edges):
        eid = _require_id(e, "edge", i)
        tail, head = e.get("tail"), e.get("head")
        if tail is None or head is None:
            raise ComplexError(f"edge {eid} is missing tail or head", eid)
        tail, head = str(tail), str(head)
        for end in (tail, head):
            if end not in vids:
                raise ComplexError(f"dangling reference: edge {eid} -> vertex {end}", eid)
        if tail == head:
            raise ComplexError(f"self-loop edge: {eid}", eid)
        edges.append(Edge(eid, tail, head, str(e.get("label", "")), tuple(e.get("tags", ()))))
    _check_unique([e.id for e in edges], "edge")
    by_id = {e.id: e for e in edges}

    faces = []
    for i, f in enumerate(raw_faces):
        fid = _require_id(f, "face", i)
        boundary = []
        for step in f.get("boundary") or []:
            eid = str(step.get("edge"))
            sign = step.get("sign", 1)
            if eid not in by_id:
                raise ComplexError(f"dangling reference: face {fid} -> edge {eid}", fid)
            if sign not in (1, -1):
                raise ComplexError(f"face {fid}: sign of {eid} must be +1 or -1", fid)
            boundary.append((eid, int(sign)))
        if not boundary:
            raise ComplexError(f"face {fid} has an empty boundary", fid)
        if len({eid for eid, _ in boundary}) != len(boundary):
            raise ComplexError(f"face {fid} repeats an edge in its boundary", fid)
        if not _closes(boundary, by_id):
            raise ComplexError(f"non-closed face boundary: {fid}", fid)
        faces.append(Face(fid, tuple(boundary), str(f.get("label", ""))))
    _check_unique([f.id for f in faces], "face")

    meta = {k: v for k, v in spec.items() if k not in ("vertices", "edges", "faces")}
    return CellComplex(vertices, tuple(edges), tuple(faces), meta)


def _closes(boundary: Sequence[tuple[str, int]], by_id: Mapping[str, Edge]) -> bool:
    def ends(eid: str, sign: int) -> tuple[str, str]:
        e = by_id[eid]
        return (e.tail, e.head) if sign > 0 else (e.head, e.tail)

    start, cur = ends(*boundary[0])
    for eid, sign in boundary[1:]:
        a, b = ends(eid, sign)
        if a != cur:
            return False
        cur = b
    return cur == start


def load_complex(path: str | Path) -> CellComplex:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ComplexError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return build_complex(doc)


def incidence_matrices(K: CellComplex) -> IncidenceMatrices:
    vidx = K.vertex_index()
    eidx = K.edge_index()
    B1 = np.zeros((K.n_vertices, K.n_edges), dtype=np.int64)
    for j, e in enumerate(K.edges):
        B1[vidx[e.tail], j] = -1
        B1[vidx[e.head], j] = 1
    B2 = np.zeros((K.n_edges, K.n_faces), dtype=np.int64)
    for j, f in enumerate(K.faces):
        for eid, sign in f.boundary:
            B2[eidx[eid], j] = sign
    return IncidenceMatrices(B1, B2)
