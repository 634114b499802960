"""End-to-end analysis run and its JSON / CSV outputs."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .complex import CellComplex, IncidenceMatrices, incidence_matrices, load_complex
from .hodge import (
    BettiNumbers,
    HodgeDecomposition,
    Spectrum,
    betti,
    hodge_decompose,
    laplacians,
    read_cochain,
    spectrum,
)
from .metric_learning import MetricLearningConfig, MetricLearningTrace, learn_metric
from .workload import GENERATOR_ID, WorkloadConfig, cold_start_cochain, latency_flow, sample_request_flow

ORTHOGONALITY_TOL = 1e-8


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class AnalysisReport:
    complex: CellComplex
    incidence: IncidenceMatrices
    flow: np.ndarray
    betti: BettiNumbers
    spectra_unit: tuple[Spectrum, Spectrum, Spectrum]
    spectra_learned: tuple[Spectrum, Spectrum, Spectrum]
    initial: HodgeDecomposition
    trace: MetricLearningTrace
    metric: np.ndarray
    config: MetricLearningConfig
    compat: bool
    provenance: dict[str, Any]

    @property
    def final(self) -> HodgeDecomposition:
        return self.trace.final

    def to_dict(self) -> dict[str, Any]:
        K = self.complex
        init, final = self.initial, self.final

        def energies(d: HodgeDecomposition) -> dict[str, float]:
            g, c, h = d.energies
            return {"gradient": g, "curl": c, "harmonic": h, "total": d.total_energy,
                    "orthogonality_residual": d.orthogonality_residual()}

        def gaps(specs) -> dict[str, float | None]:
            return {f"L{k}": s.gap for k, s in enumerate(specs)}

        e_init = init.harmonic_edge_energy()
        e_final = final.harmonic_edge_energy()
        edges = [
            {
                "edge_id": e.id,
                "label": e.label,
                "tags": list(e.tags),
                "flow": float(self.flow[i]),
                "h_initial": float(init.harm[i]),
                "h_final": float(final.harm[i]),
                "abs_h_initial": float(abs(init.harm[i])),
                "abs_h_final": float(abs(final.harm[i])),
                "energy_initial": float(e_init[i]),
                "energy_final": float(e_final[i]),
                "learned_weight": float(self.metric[i]),
            }
            for i, e in enumerate(K.edges)
        ]
        trajectory = [
            {
                "iteration": r.iteration,
                "J": r.J,
                "harmonic_term": r.terms[0],
                "trace_term": r.terms[1],
                "deviation_term": r.terms[2],
                "relative_change": r.rel_change,
                "J_after_update": r.j_after_update,
            }
            for r in self.trace.records
        ]
        residual = final.orthogonality_residual()
        return {
            "tool": {"name": "faashodge", "version": __version__},
            "complex": {
                "name": K.meta.get("name"),
                "version": K.meta.get("version"),
                "N": K.n_vertices,
                "M": K.n_edges,
                "F": K.n_faces,
            },
            "provenance": self.provenance,
            "parameters": {**self.config.to_document(), "compat_paper_projections": self.compat},
            "betti": self.betti._asdict(),
            "spectral_gaps": {"unit_metric": gaps(self.spectra_unit),
                              "learned_metric": gaps(self.spectra_learned)},
            "initial_decomposition": energies(init),
            "final_decomposition": energies(final),
            "orthogonality": {
                "tolerance": ORTHOGONALITY_TOL,
                "final_residual": residual,
                "violated": residual > ORTHOGONALITY_TOL,
            },
            "metric_learning": {
                "status": self.trace.status,
                "updates": self.trace.n_updates,
                "J_initial": self.trace.records[0].J,
                "J_final": self.trace.records[-1].J,
                "trajectory": trajectory,
            },
            "edges": edges,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def run_pipeline(
    graph: str | Path,
    *,
    flow: str | Path | None = None,
    workload: WorkloadConfig | str | Path | None = None,
    config: MetricLearningConfig | None = None,
    compat: bool = False,
) -> AnalysisReport:
    """Build the complex, load or generate the flow, learn the metric.

    Exactly one of ``flow`` (a ``cell_id,value`` file) and ``workload`` (a
    config or its file) selects the flow source.
    """
    if (flow is None) == (workload is None):
        raise ValueError("give exactly one of flow or workload")
    graph = Path(graph)
    K = load_complex(graph)
    B = incidence_matrices(K)
    cfg = config or MetricLearningConfig()
    provenance: dict[str, Any] = {"graph_file": graph.name, "graph_sha256": _sha256(graph)}

    if flow is not None:
        flow = Path(flow)
        f = read_cochain(flow, K.edge_ids())
        provenance["flow"] = {"source": "cochain_file", "file": flow.name, "sha256": _sha256(flow)}
    else:
        if not isinstance(workload, WorkloadConfig):
            workload = WorkloadConfig.load(workload)
        f = latency_flow(sample_request_flow(K, workload), cold_start_cochain(K, workload))
        provenance["flow"] = {"source": "workload", "config": workload.to_document(),
                              "generator": GENERATOR_ID}

    initial = hodge_decompose(f, B, None, compat=compat)
    metric, trace = learn_metric(f, B, cfg, compat=compat)

    def spectra(m):
        L0, L1, L2 = laplacians(B, m, compat=compat)
        return (spectrum(L0), spectrum(L1, metric=None if compat else m), spectrum(L2))

    return AnalysisReport(
        complex=K,
        incidence=B,
        flow=f,
        betti=betti(B),
        spectra_unit=spectra(None),
        spectra_learned=spectra(metric),
        initial=initial,
        trace=trace,
        metric=metric,
        config=cfg,
        compat=compat,
        provenance=provenance,
    )


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_series(report: AnalysisReport, outdir: str | Path) -> list[Path]:
    """Write the plot-data CSVs and return their paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    K = report.complex
    written = []

    path = outdir / "j_trajectory.csv"
    _write_csv(path, ["iter", "J", "harm_term", "trace_term", "dev_term"],
               ([r.iteration, repr(r.J), *map(repr, r.terms)] for r in report.trace.records))
    written.append(path)

    h0, h1 = report.initial.harm, report.final.harm
    e0, e1 = report.initial.harmonic_edge_energy(), report.final.harmonic_edge_energy()
    path = outdir / "harmonic_edges.csv"
    _write_csv(
        path,
        ["edge_id", "label", "h_initial", "h_final", "energy_initial", "energy_final"],
        ([e.id, e.label, repr(float(h0[i])), repr(float(h1[i])), repr(float(e0[i])),
          repr(float(e1[i]))] for i, e in enumerate(K.edges)),
    )
    written.append(path)

    path = outdir / "learned_metric.csv"
    _write_csv(path, ["edge_id", "m_e"],
               ([e.id, repr(float(report.metric[i]))] for i, e in enumerate(K.edges)))
    written.append(path)

    for k in range(3):
        path = outdir / f"spectrum_L{k}.csv"
        unit = report.spectra_unit[k].eigenvalues
        learned = report.spectra_learned[k].eigenvalues
        _write_csv(path, ["index", "eigenvalue_unit", "eigenvalue_learned"],
                   ([i, repr(float(a)), repr(float(b))] for i, (a, b) in enumerate(zip(unit, learned))))
        written.append(path)
    return written
