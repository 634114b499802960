"""Alternating metric learning on edge weights.

The cost is

    J(m) = sum_e m_e h_e^2 + lam * sum_e m_e + beta * sum_e (m_e - m_ref_e)^2

where ``h`` is the harmonic part of the flow under ``diag(m)``. The loop fixes
``m``, decomposes, then fixes ``h`` and minimizes the (convex, per-edge
separable) cost over ``m >= m_min`` in closed form.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .complex import IncidenceMatrices
from .hodge import HodgeDecomposition, hodge_decompose

CONVERGED = "converged"
MAX_ITERS_REACHED = "max_iters_reached"


class MetricLearningError(RuntimeError):
    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class MetricLearningConfig:
    """Parameters of the alternating loop.

    ``m_ref`` is a scalar (uniform reference weight) or a per-edge sequence.
    ``alpha`` is carried for bookkeeping only; no computation reads it.
    """

    lam: float = 0.01
    beta: float = 1.0
    m_min: float = 1e-3
    m_ref: float | tuple[float, ...] = 1.0
    epsilon: float = 1e-6
    max_iters: int = 100
    alpha: float = 1e-3

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.m_min <= 0:
            raise ValueError("m_min must be > 0")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not isinstance(self.m_ref, (int, float)):
            object.__setattr__(self, "m_ref", tuple(float(x) for x in self.m_ref))
        if np.any(np.asarray(self.m_ref, dtype=float) < self.m_min):
            raise ValueError("m_ref weights must be >= m_min")

    def reference(self, n_edges: int) -> np.ndarray:
        ref = np.asarray(self.m_ref, dtype=float)
        if ref.ndim == 0:
            return np.full(n_edges, float(ref))
        if ref.shape != (n_edges,):
            raise ValueError(f"m_ref has {ref.size} weights for {n_edges} edges")
        return ref.copy()

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "MetricLearningConfig":
        known = {"lambda": "lam", "lam": "lam", "beta": "beta", "m_min": "m_min",
                 "m_ref": "m_ref", "epsilon": "epsilon", "max_iters": "max_iters",
                 "alpha": "alpha"}
        unknown = set(doc) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{known[k]: v for k, v in doc.items()})

    @classmethod
    def load(cls, path: str | Path) -> "MetricLearningConfig":
        return cls.from_document(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_document(self) -> dict:
        doc = asdict(self)
        doc["lambda"] = doc.pop("lam")
        if isinstance(self.m_ref, tuple):
            doc["m_ref"] = list(self.m_ref)
        return doc


def cost_functional(h, m, cfg: MetricLearningConfig) -> tuple[float, tuple[float, float, float]]:
    """Return ``J`` and its (harmonic, trace, deviation) terms."""
    h = np.asarray(h, dtype=float)
    m = np.asarray(m, dtype=float)
    if h.shape != m.shape:
        raise ValueError(f"harmonic flow {h.shape} and metric {m.shape} differ in shape")
    ref = cfg.reference(m.size)
    harm = float(np.sum(m * h**2))
    trace = cfg.lam * float(np.sum(m))
    dev = cfg.beta * float(np.sum((m - ref) ** 2))
    return harm + trace + dev, (harm, trace, dev)


def cost_gradient(h, m, cfg: MetricLearningConfig) -> np.ndarray:
    """Partial derivatives of ``J`` in ``m`` with ``h`` held fixed."""
    h = np.asarray(h, dtype=float)
    m = np.asarray(m, dtype=float)
    return h**2 + cfg.lam + 2.0 * cfg.beta * (m - cfg.reference(m.size))


def metric_update(h, cfg: MetricLearningConfig) -> np.ndarray:
    """Exact minimizer of the fixed-``h`` subproblem, edge by edge."""
    h = np.asarray(h, dtype=float)
    ref = cfg.reference(h.size)
    return np.maximum(cfg.m_min, ref - (h**2 + cfg.lam) / (2.0 * cfg.beta))


@dataclass
class IterationRecord:
    """One pass of the loop.

    ``metric`` and ``harmonic`` are the weights and harmonic flow the pass
    started from. Update records also carry the subproblem cost after the
    step (``j_after_update``, same ``h``) and the relative weight change; the
    closing evaluation record of a run has neither.
    """

    iteration: int
    J: float
    terms: tuple[float, float, float]
    metric: np.ndarray
    harmonic: np.ndarray
    rel_change: float | None = None
    j_after_update: float | None = None

    @property
    def is_update(self) -> bool:
        return self.rel_change is not None


@dataclass
class MetricLearningTrace:
    records: list[IterationRecord] = field(default_factory=list)
    status: str = MAX_ITERS_REACHED
    final: HodgeDecomposition | None = None

    @property
    def n_updates(self) -> int:
        return sum(r.is_update for r in self.records)

    @property
    def J(self) -> np.ndarray:
        return np.array([r.J for r in self.records])


def learn_metric(
    f,
    B: IncidenceMatrices,
    cfg: MetricLearningConfig | None = None,
    *,
    compat: bool = False,
) -> tuple[np.ndarray, MetricLearningTrace]:
    """Alternate decomposition and closed-form metric steps until the relative
    weight change drops below ``cfg.epsilon`` or ``cfg.max_iters`` steps ran.

    The trace holds one record per metric step plus a closing record that
    evaluates ``J`` at the returned metric, so a run of ``k`` steps has
    ``k + 1`` records.
    """
    cfg = cfg or MetricLearningConfig()
    f = np.asarray(f, dtype=float)
    m = cfg.reference(B.B1.shape[1])
    trace = MetricLearningTrace()

    def decompose(k: int, weights: np.ndarray) -> HodgeDecomposition:
        try:
            return hodge_decompose(f, B, weights, compat=compat)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise MetricLearningError(str(exc), k) from exc

    for k in range(cfg.max_iters):
        dec = decompose(k, m)
        h = dec.harm
        J, terms = cost_functional(h, m, cfg)
        m_next = metric_update(h, cfg)
        J_next, _ = cost_functional(h, m_next, cfg)
        rel = float(np.linalg.norm(m_next - m) / np.linalg.norm(m))
        trace.records.append(IterationRecord(k, J, terms, m.copy(), h.copy(), rel, J_next))
        m = m_next
        if rel < cfg.epsilon:
            trace.status = CONVERGED
            break

    k = len(trace.records)
    dec = decompose(k, m)
    J, terms = cost_functional(dec.harm, m, cfg)
    trace.records.append(IterationRecord(k, J, terms, m.copy(), dec.harm.copy()))
    trace.final = dec
    return m, trace
