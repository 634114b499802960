"""Command-line entry point.

    faashodge analyze --graph G.json (--flow F.csv | --workload W.json) --out report.json
    faashodge reference --dir DIR
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from dataclasses import replace
from pathlib import Path

from .complex import ComplexError
from .hodge import CochainError
from .metric_learning import MetricLearningConfig
from .report import emit_series, run_pipeline
from .workload import WorkloadConfig, reference_graph_path


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="faashodge", description="Hodge analysis of serverless invocation flows.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decompose a flow and learn the edge metric")
    a.add_argument("--graph", required=True, type=Path, help="graph document (JSON)")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--flow", type=Path, help="edge cochain file (cell_id,value)")
    src.add_argument("--workload", type=Path, help="workload config document (JSON)")
    a.add_argument("--config", type=Path, help="metric-learning config document (JSON)")
    a.add_argument("--lambda", dest="lam", type=float)
    a.add_argument("--beta", type=float)
    a.add_argument("--m-min", dest="m_min", type=float)
    a.add_argument("--epsilon", type=float)
    a.add_argument("--max-iters", dest="max_iters", type=int)
    a.add_argument("--seed", type=int, help="override the workload seed")
    a.add_argument("--compat-paper-projections", dest="compat", action="store_true",
                   help="use the literal M1^-1 normal equations (not orthogonal)")
    a.add_argument("--out", required=True, type=Path, help="report JSON path")
    a.add_argument("--emit-csv", type=Path, metavar="DIR", help="write plot-data CSVs here")

    r = sub.add_parser("reference", help="write the reference graph and default configs")
    r.add_argument("--dir", required=True, type=Path)
    return p


def _analyze(args) -> int:
    cfg = MetricLearningConfig.load(args.config) if args.config else MetricLearningConfig()
    overrides = {k: getattr(args, k) for k in ("lam", "beta", "m_min", "epsilon", "max_iters")
                 if getattr(args, k) is not None}
    if overrides:
        cfg = replace(cfg, **overrides)

    workload = None
    if args.workload is not None:
        workload = WorkloadConfig.load(args.workload)
        if args.seed is not None:
            workload = replace(workload, seed=args.seed)

    report = run_pipeline(args.graph, flow=args.flow, workload=workload, config=cfg,
                          compat=args.compat)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(report.to_json(), encoding="utf-8")
    if args.emit_csv is not None:
        emit_series(report, args.emit_csv)

    data = report.to_dict()
    ml = data["metric_learning"]
    print(f"{data['complex']['name'] or args.graph.name}: N={report.complex.n_vertices} "
          f"M={report.complex.n_edges} F={report.complex.n_faces} betti={tuple(report.betti)}")
    print(f"metric learning: {ml['status']} after {ml['updates']} updates, "
          f"J {ml['J_initial']:.6g} -> {ml['J_final']:.6g}")
    if data["orthogonality"]["violated"]:
        print(f"warning: components not M1-orthogonal "
              f"(residual {data['orthogonality']['final_residual']:.3e})")
    return 0


def _reference(args) -> int:
    args.dir.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(reference_graph_path(), args.dir / "ecommerce_reference.json")
    (args.dir / "workload.json").write_text(
        json.dumps(WorkloadConfig().to_document(), indent=2) + "\n", encoding="utf-8")
    (args.dir / "config.json").write_text(
        json.dumps(MetricLearningConfig().to_document(), indent=2) + "\n", encoding="utf-8")
    print(f"wrote reference inputs to {args.dir}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _analyze(args)
        return _reference(args)
    except (ComplexError, CochainError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"faashodge: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
