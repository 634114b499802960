"""Synthetic flows for the e-commerce reference scenario and small presets.

Request counts are Poisson draws on every edge plus additive hotspot
increments. Cold-start latency is a cochain that puts a function's cold-start
weight on each edge entering it; the latency flow is the elementwise product
of the two.

Poisson sampling: uniforms come from numpy's PCG64 stream seeded with
``seed``; counts are drawn by sequential-search inversion of the CDF for means
up to ``INVERSION_MAX_MEAN`` and by numpy's PTRS sampler above that (inversion
underflows there).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .complex import CellComplex, build_complex

REFERENCE_GRAPH = "ecommerce_reference.json"
INVERSION_MAX_MEAN = 500.0
GENERATOR_ID = f"numpy-PCG64/poisson-inversion(mean<={INVERSION_MAX_MEAN:g}),PTRS-above"
COMPENSATION_TAG = "compensation_loop"


def reference_graph_path() -> Path:
    return Path(str(resources.files("faashodge") / "data" / REFERENCE_GRAPH))


def reference_ecommerce_complex() -> CellComplex:
    return build_complex(json.loads(reference_graph_path().read_text(encoding="utf-8")))


@dataclass(frozen=True)
class WorkloadConfig:
    seed: int = 7
    base_mean: float = 10.0
    hotspots: tuple[tuple[str, float], ...] = (
        ("apiGateway->authenticate", 30.0),
        ("processPayment->validatePayment", 15.0),
    )
    cold_functions: tuple[tuple[str, float], ...] = (
        ("processPayment", 30.0),
        ("validatePayment", 20.0),
        ("syncInventory", 40.0),
    )
    warm_baseline: float = 0.0

    def __post_init__(self):
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.base_mean <= 0:
            raise ValueError("base_mean must be > 0")
        if self.warm_baseline < 0:
            raise ValueError("warm_baseline must be >= 0")
        for _, inc in self.hotspots:
            if inc < 0:
                raise ValueError("hotspot increments must be >= 0")
        for _, w in self.cold_functions:
            if w < 0:
                raise ValueError("cold-start weights must be >= 0")
        object.__setattr__(self, "hotspots", tuple((str(e), float(x)) for e, x in self.hotspots))
        object.__setattr__(
            self, "cold_functions", tuple((str(v), float(x)) for v, x in self.cold_functions)
        )

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "WorkloadConfig":
        kwargs: dict[str, Any] = {}
        for key in ("seed", "base_mean", "warm_baseline"):
            if key in doc:
                kwargs[key] = doc[key]
        if "hotspots" in doc:
            kwargs["hotspots"] = tuple((h["edge"], h["increment"]) for h in doc["hotspots"])
        if "cold_functions" in doc:
            kwargs["cold_functions"] = tuple(
                (c["vertex"], c["weight"]) for c in doc["cold_functions"]
            )
        unknown = set(doc) - {"seed", "base_mean", "warm_baseline", "hotspots", "cold_functions"}
        if unknown:
            raise ValueError(f"unknown workload keys: {sorted(unknown)}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "WorkloadConfig":
        return cls.from_document(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_document(self) -> dict:
        return {
            "seed": self.seed,
            "base_mean": self.base_mean,
            "hotspots": [{"edge": e, "increment": x} for e, x in self.hotspots],
            "cold_functions": [{"vertex": v, "weight": x} for v, x in self.cold_functions],
            "warm_baseline": self.warm_baseline,
        }


def _poisson_inversion(u: float, mean: float) -> int:
    k = 0
    p = math.exp(-mean)
    cdf = p
    while u > cdf:
        k += 1
        p *= mean / k
        cdf += p
        if p == 0.0 and k > mean:
            break
    return k


def poisson_sample(rng: np.random.Generator, mean: float, size: int) -> np.ndarray:
    if mean > INVERSION_MAX_MEAN:
        return rng.poisson(mean, size).astype(float)
    u = rng.random(size)
    return np.array([_poisson_inversion(x, mean) for x in u], dtype=float)


def sample_request_flow(K: CellComplex, cfg: WorkloadConfig) -> np.ndarray:
    eidx = K.edge_index()
    for eid, _ in cfg.hotspots:
        if eid not in eidx:
            raise KeyError(f"unknown edge id in hotspots: {eid}")
    rng = np.random.default_rng(cfg.seed)
    f = poisson_sample(rng, cfg.base_mean, K.n_edges)
    for eid, inc in cfg.hotspots:
        f[eidx[eid]] += inc
    return f


def cold_start_cochain(K: CellComplex, cfg: WorkloadConfig) -> np.ndarray:
    vids = set(K.vertex_ids())
    weights = {}
    for vid, w in cfg.cold_functions:
        if vid not in vids:
            raise KeyError(f"unknown vertex id in cold_functions: {vid}")
        weights[vid] = w
    return np.array([weights.get(e.head, cfg.warm_baseline) for e in K.edges], dtype=float)


def latency_flow(f_req, f_cs) -> np.ndarray:
    f_req = np.asarray(f_req, dtype=float)
    f_cs = np.asarray(f_cs, dtype=float)
    if f_req.shape != f_cs.shape:
        raise ValueError(f"flow shapes differ: {f_req.shape} vs {f_cs.shape}")
    return f_req * f_cs


def reference_flow(K: CellComplex | None = None, cfg: WorkloadConfig | None = None) -> np.ndarray:
    """Latency flow of the reference scenario."""
    K = K or reference_ecommerce_complex()
    cfg = cfg or WorkloadConfig()
    return latency_flow(sample_request_flow(K, cfg), cold_start_cochain(K, cfg))


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    complex: CellComplex
    workload: WorkloadConfig
    signature: str
    circulation: tuple[float, ...] = field(default=())


def _cycle_doc(names, labels, filled: bool, face_label: str) -> dict:
    n = len(names)
    edges = [
        {"id": f"{names[i]}->{names[(i + 1) % n]}", "tail": names[i],
         "head": names[(i + 1) % n], "label": labels[i]}
        for i in range(n)
    ]
    faces = []
    if filled:
        faces.append({"id": "cell", "label": face_label,
                      "boundary": [{"edge": e["id"], "sign": 1} for e in edges]})
    return {"vertices": [{"id": v, "label": v} for v in names], "edges": edges, "faces": faces}


def scenario_presets() -> list[ScenarioPreset]:
    """Small complexes for the cycle types of the topological taxonomy.

    Betti numbers, computed from the complexes:

    ==========================  =======================
    preset                      (beta0, beta1, beta2)
    ==========================  =======================
    closed_transactional_loop   (1, 1, 0)
    saga_surface                (1, 0, 0)
    feedback_pipeline           (1, 1, 0)
    cold_start_retry_loop       (1, 1, 0)
    ==========================  =======================
    """
    loop = ["orders", "payments", "shipping", "inventory"]
    loop_labels = ["charge", "ship", "reserve stock", "restock order"]
    presets = [
        ScenarioPreset(
            "closed_transactional_loop",
            build_complex(_cycle_doc(loop, loop_labels, False, "")),
            WorkloadConfig(hotspots=(), cold_functions=(("payments", 30.0),)),
            "unfilled 4-cycle; circulation is entirely harmonic",
            (1.0, 1.0, 1.0, 1.0),
        ),
        ScenarioPreset(
            "saga_surface",
            build_complex(_cycle_doc(loop, loop_labels, True, "compensating saga")),
            WorkloadConfig(hotspots=(), cold_functions=(("payments", 30.0),)),
            "same 4-cycle bounded by a saga cell; circulation is entirely curl",
            (1.0, 1.0, 1.0, 1.0),
        ),
    ]
    pipe = {
        "vertices": [{"id": v, "label": v} for v in ("ingest", "preprocess", "train", "validate")],
        "edges": [
            {"id": "ingest->preprocess", "tail": "ingest", "head": "preprocess", "label": "batch"},
            {"id": "preprocess->train", "tail": "preprocess", "head": "train", "label": "features"},
            {"id": "train->validate", "tail": "train", "head": "validate", "label": "model"},
            {"id": "validate->preprocess", "tail": "validate", "head": "preprocess",
             "label": "feedback"},
        ],
        "faces": [],
    }
    presets.append(ScenarioPreset(
        "feedback_pipeline", build_complex(pipe),
        WorkloadConfig(hotspots=(("ingest->preprocess", 10.0),), cold_functions=(("train", 20.0),)),
        "DAG plus one feedback edge; the feedback triangle carries the harmonic part",
        (0.0, 1.0, 1.0, 1.0),
    ))
    retry = ["invokeA", "coldStartB", "timeout"]
    presets.append(ScenarioPreset(
        "cold_start_retry_loop",
        build_complex(_cycle_doc(retry, ["invoke", "time out", "retry"], False, "")),
        WorkloadConfig(hotspots=(), cold_functions=(("coldStartB", 40.0),)),
        "invoke/timeout/retry triangle with no managing cell",
        (1.0, 1.0, 1.0),
    ))
    return presets
