"""Weighted Hodge Laplacians and the gradient/curl/harmonic split of edge flows.

Inner products: ``<u, v> = u^T M1 v`` on edges with ``M1 = diag(m)``, identity
on vertices and faces. With these the adjoints are ``d0* = B1 M1`` and
``d1* = M1^{-1} B2``, so the gradient space is ``im(B1^T)`` and the curl space
is ``im(M1^{-1} B2)``. Both are M1-orthogonal because ``B1 B2 = 0``.

``compat=True`` switches to the literal normal equations
``B1 M1^{-1} B1^T phi = B1 M1^{-1} f`` and ``B2^T M1^{-1} B2 psi = B2^T M1^{-1} f``
with components ``B1^T phi`` and ``B2 psi``. Those components are not
orthogonal in the M1 inner product once ``M1 != I``; the switch exists to
measure that.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .complex import IncidenceMatrices

RANK_TOL = 1e-10
KERNEL_TOL = 1e-9


class CochainError(ValueError):
    pass


def as_metric(m, n_edges: int) -> np.ndarray:
    """Return edge weights as a float vector; ``None`` means the identity metric."""
    if m is None:
        return np.ones(n_edges)
    w = np.asarray(m, dtype=float)
    if w.ndim == 0:
        w = np.full(n_edges, float(w))
    if w.shape != (n_edges,):
        raise ValueError(f"metric has shape {w.shape}, expected ({n_edges},)")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("metric weights must be finite and positive")
    return w


def _as_flow(f, n_edges: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (n_edges,):
        raise ValueError(f"flow has shape {f.shape}, expected ({n_edges},)")
    if not np.all(np.isfinite(f)):
        raise ValueError("flow contains non-finite values")
    return f


def laplacians(B: IncidenceMatrices, m=None, *, compat: bool = False):
    """Return ``(L0, L1, L2)`` for edge weights ``m``.

    ``L1`` is not symmetric for a non-uniform metric; ``M1 @ L1`` is.
    """
    B1 = B.B1.astype(float)
    B2 = B.B2.astype(float)
    w = as_metric(m, B1.shape[1])
    inv = 1.0 / w
    L0 = (B1 * w) @ B1.T
    L1 = B1.T @ (B1 * w) + (inv[:, None] * B2) @ B2.T
    # the literal weighted L1 gradient term B1^T M1 B1 is not conformable; only L2 differs
    L2 = (B2.T * w) @ B2 if compat else (B2.T * inv) @ B2
    return L0, L1, L2


@dataclass(frozen=True)
class HodgeDecomposition:
    phi: np.ndarray
    psi: np.ndarray
    grad: np.ndarray
    curl: np.ndarray
    harm: np.ndarray
    metric: np.ndarray
    compat: bool = False

    @property
    def flow(self) -> np.ndarray:
        return self.grad + self.curl + self.harm

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(self.metric * u * v))

    @property
    def energies(self) -> tuple[float, float, float]:
        return (
            self.inner(self.grad, self.grad),
            self.inner(self.curl, self.curl),
            self.inner(self.harm, self.harm),
        )

    @property
    def total_energy(self) -> float:
        f = self.flow
        return self.inner(f, f)

    def harmonic_edge_energy(self) -> np.ndarray:
        return self.metric * self.harm**2

    def orthogonality_residual(self) -> float:
        """Largest |pairwise M1 inner product| relative to ``||f||^2_M1``."""
        total = self.total_energy
        if total == 0.0:
            return 0.0
        pairs = (
            self.inner(self.grad, self.curl),
            self.inner(self.grad, self.harm),
            self.inner(self.curl, self.harm),
        )
        return max(abs(p) for p in pairs) / total


def _min_norm(A: np.ndarray, b: np.ndarray, rank_tol: float) -> np.ndarray:
    if A.shape[1] == 0:
        return np.zeros(0)
    x, *_ = np.linalg.lstsq(A, b, rcond=rank_tol)
    return x


def hodge_decompose(
    f,
    B: IncidenceMatrices,
    m=None,
    *,
    compat: bool = False,
    rank_tol: float = RANK_TOL,
) -> HodgeDecomposition:
    """Split the edge flow ``f`` into gradient, curl and harmonic parts.

    Potentials are the minimum-norm solutions of the normal equations. The
    solves run on the weighted factors (``sqrt(m) * B1^T`` and
    ``B2 / sqrt(m)``) rather than on the squared systems, which gives the same
    minimum-norm solution with the condition number of the factor.
    """
    B1 = B.B1.astype(float)
    B2 = B.B2.astype(float)
    n_edges = B1.shape[1]
    f = _as_flow(f, n_edges)
    w = as_metric(m, n_edges)
    s = np.sqrt(w)

    if compat:
        phi = _min_norm(B1.T / s[:, None], f / s, rank_tol)
        psi = _min_norm(B2 / s[:, None], f / s, rank_tol)
        grad = B1.T @ phi
        curl = B2 @ psi
    else:
        phi = _min_norm(B1.T * s[:, None], f * s, rank_tol)
        psi = _min_norm(B2 / s[:, None], f * s, rank_tol)
        grad = B1.T @ phi
        curl = (B2 @ psi) / w
    if B2.shape[1] == 0:
        curl = np.zeros(n_edges)
    harm = f - grad - curl
    return HodgeDecomposition(phi, psi, grad, curl, harm, w, compat)


class BettiNumbers(NamedTuple):
    beta0: int
    beta1: int
    beta2: int


def numerical_rank(A: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    if A.size == 0:
        return 0
    sv = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv >= rank_tol * sv[0]))


def betti(B: IncidenceMatrices, rank_tol: float = RANK_TOL) -> BettiNumbers:
    """Kernel dimensions of the unit-metric Hodge Laplacians."""
    if not 0.0 < rank_tol < 1.0:
        raise ValueError("rank_tol must lie in (0, 1)")
    L0, L1, L2 = laplacians(B)
    return BettiNumbers(*(L.shape[0] - numerical_rank(L, rank_tol) for L in (L0, L1, L2)))


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    gap: float | None
    kernel_dim: int


def spectrum(L, metric=None, kernel_tol: float = KERNEL_TOL) -> Spectrum:
    """Ascending eigenvalues of a Laplacian and its smallest nonzero eigenvalue.

    Pass ``metric`` for an operator that is self-adjoint under ``diag(metric)``
    (the weighted ``L1``); it is symmetrized by the similarity
    ``M^{1/2} L M^{-1/2}`` before the symmetric eigensolver runs.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"spectrum needs a square matrix, got shape {L.shape}")
    if L.shape[0] == 0:
        return Spectrum(np.zeros(0), None, 0)
    if metric is not None:
        s = np.sqrt(as_metric(metric, L.shape[0]))
        L = s[:, None] * L / s[None, :]
    if np.allclose(L, L.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(L).max())):
        ev = np.linalg.eigvalsh(0.5 * (L + L.T))
    else:
        ev = np.sort(np.linalg.eigvals(L).real)
    tol = kernel_tol * max(1.0, float(np.abs(ev).max()))
    ev = np.where(np.abs(ev) <= tol, 0.0, ev)
    nonzero = ev[ev > tol]
    gap = float(nonzero[0]) if nonzero.size else None
    return Spectrum(ev, gap, int(np.sum(ev == 0.0)))


def read_cochain(path: str | Path, cell_ids: Sequence[str]) -> np.ndarray:
    """Read a ``cell_id,value`` file into a vector ordered like ``cell_ids``."""
    path = Path(path)
    index = {cid: i for i, cid in enumerate(cell_ids)}
    values = np.full(len(cell_ids), np.nan)
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["cell_id", "value"]:
            raise CochainError(f"{path}: line 1: expected header 'cell_id,value'")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise CochainError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            cid, raw = row[0].strip(), row[1].strip()
            if cid not in index:
                raise CochainError(f"{path}: line {lineno}: unknown cell id {cid}")
            if cid in seen:
                raise CochainError(f"{path}: line {lineno}: duplicate cell id {cid}")
            try:
                val = float(raw)
            except ValueError:
                raise CochainError(f"{path}: line {lineno}: bad value {raw!r} for {cid}") from None
            if not math.isfinite(val):
                raise CochainError(f"{path}: line {lineno}: non-finite value for {cid}")
            seen.add(cid)
            values[index[cid]] = val
    missing = [cid for cid in cell_ids if cid not in seen]
    if missing:
        raise CochainError(f"{path}: missing row for cell id {missing[0]}")
    return values


def write_cochain(path: str | Path, cell_ids: Sequence[str], values) -> None:
    values = np.asarray(values, dtype=float)
    if len(values) != len(cell_ids):
        raise CochainError("cochain length does not match the cell list")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell_id", "value"])
        for cid, v in zip(cell_ids, values):
            w.writerow([cid, repr(float(v))])
