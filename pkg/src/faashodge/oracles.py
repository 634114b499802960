"""Brute-force reference computations used to check the main code path.

Nothing in the library imports this module. Each routine takes a different
route from the code it checks: Gram-Schmidt instead of least squares,
union-find instead of Laplacian ranks, grid search instead of the closed form.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .complex import CellComplex, IncidenceMatrices, build_complex


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_abs_dev: float
    max_rel_dev: float
    samples: int

    def within(self, tol: float, relative: bool = False) -> bool:
        return (self.max_rel_dev if relative else self.max_abs_dev) <= tol


def compare(name: str, expected, actual) -> OracleReport:
    expected = np.atleast_1d(np.asarray(expected, dtype=float))
    actual = np.atleast_1d(np.asarray(actual, dtype=float))
    dev = np.abs(expected - actual)
    scale = np.maximum(np.abs(expected), np.finfo(float).tiny)
    return OracleReport(name, float(dev.max(initial=0.0)), float((dev / scale).max(initial=0.0)),
                        expected.size)


def projector_oracle(f, basis_columns, m=None, tol: float = 1e-12) -> np.ndarray:
    """M-orthogonal projection of ``f`` onto the span of ``basis_columns``.

    Modified Gram-Schmidt with one reorthogonalization pass; columns whose
    residual norm falls below ``tol`` times their original norm are dropped.
    """
    f = np.asarray(f, dtype=float)
    A = np.asarray(basis_columns, dtype=float)
    w = np.ones(f.size) if m is None else np.asarray(m, dtype=float)

    def ip(u, v):
        return float(np.sum(w * u * v))

    Q: list[np.ndarray] = []
    for j in range(A.shape[1] if A.ndim == 2 else 0):
        v = A[:, j].copy()
        n0 = np.sqrt(ip(v, v))
        if n0 == 0.0:
            continue
        for _ in range(2):
            for q in Q:
                v -= ip(q, v) * q
        n = np.sqrt(ip(v, v))
        if n <= tol * n0:
            continue
        Q.append(v / n)
    out = np.zeros_like(f)
    for q in Q:
        out += ip(q, f) * q
    return out


def decompose_oracle(f, B: IncidenceMatrices, m=None):
    """(grad, curl, harm) by explicit projection onto im(B1^T) and im(M^-1 B2)."""
    f = np.asarray(f, dtype=float)
    w = np.ones(f.size) if m is None else np.asarray(m, dtype=float)
    grad = projector_oracle(f, B.B1.T, w)
    curl = projector_oracle(f, B.B2 / w[:, None], w)
    return grad, curl, f - grad - curl


def component_count(K: CellComplex) -> int:
    parent = {v: v for v in K.vertex_ids()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in K.edges:
        a, b = find(e.tail), find(e.head)
        if a != b:
            parent[a] = b
    return len({find(v) for v in parent})


def scalar_subproblem_oracle(h_e: float, lam: float, beta: float, m_min: float,
                             m_ref: float, resolution: float = 1e-7) -> float:
    """Minimize ``m h^2 + lam m + beta (m - m_ref)^2`` over ``[m_min, m_ref + 1]``
    by grid search, shrinking the bracket around the best point until the grid
    spacing is below ``resolution``."""

    def g(m):
        return m * h_e**2 + lam * m + beta * (m - m_ref) ** 2

    lo, hi = m_min, m_ref + 1.0
    while True:
        grid = np.linspace(lo, hi, 201)
        i = int(np.argmin(g(grid)))
        step = grid[1] - grid[0]
        if step < resolution:
            return float(grid[i])
        lo, hi = max(m_min, grid[i] - step), min(m_ref + 1.0, grid[i] + step)


def cycle_rank_oracle(B: IncidenceMatrices, tol: float = 1e-10) -> int:
    def rank(A):
        if A.size == 0:
            return 0
        sv = np.linalg.svd(A.astype(float), compute_uv=False)
        return int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0

    return B.B1.shape[1] - rank(B.B1) - rank(B.B2)


def random_complex(rng: np.random.Generator, max_vertices: int = 30, max_edges: int = 60,
                   max_faces: int = 8) -> CellComplex:
    """Random valid complex; faces are filled along short cycles through a random edge."""
    n = int(rng.integers(2, max_vertices + 1))
    m = int(rng.integers(1, max_edges + 1))
    vertices = [f"v{i}" for i in range(n)]
    edges = []
    for j in range(m):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((f"e{j}", f"v{a}", f"v{b}"))

    adj: dict[str, list[tuple[str, str, int]]] = {v: [] for v in vertices}
    for eid, t, h in edges:
        adj[t].append((h, eid, 1))
        adj[h].append((t, eid, -1))

    faces = []
    seen: set[frozenset] = set()
    for _ in range(3 * max_faces):
        if len(faces) >= max_faces:
            break
        eid, t, h = edges[int(rng.integers(len(edges)))]
        # BFS from head back to tail without reusing the seed edge
        prev: dict[str, tuple[str, str, int] | None] = {h: None}
        queue = deque([h])
        while queue and t not in prev:
            x = queue.popleft()
            for y, e2, s in adj[x]:
                if e2 != eid and y not in prev:
                    prev[y] = (x, e2, s)
                    queue.append(y)
        if t not in prev:
            continue
        path = []
        x = t
        while prev[x] is not None:
            px, e2, s = prev[x]
            path.append((e2, s))
            x = px
        boundary = [(eid, 1)] + path[::-1]
        key = frozenset(e for e, _ in boundary)
        if key in seen:
            continue
        seen.add(key)
        faces.append(boundary)

    doc = {
        "vertices": [{"id": v} for v in vertices],
        "edges": [{"id": e, "tail": t, "head": h} for e, t, h in edges],
        "faces": [
            {"id": f"f{k}", "boundary": [{"edge": e, "sign": s} for e, s in b]}
            for k, b in enumerate(faces)
        ],
    }
    return build_complex(doc)
