"""Command-line interface.

Subcommands: ``detect``, ``dump-stages``, ``eval``, ``sweep``, ``bench`` and
``generate``. Results go to stdout as JSON or CSV. Exit status is 0 on
success, 2 for bad input and 3 when a numerical stage fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .exceptions import InputError, NumericalError, RbfScoreError
from .graph_io import attach_labels, parse_edge_list, read_graph, serialize_edge_list
from .graph_io import serialize_labels
from .katz import KatzConfig
from .metrics import modularity, nmi
from .rbf import RbfChoice, RbfKind
from .spectral import PipelineConfig, Variant, detect
from .synth import (PlantedConfig, SweepSpec, bench_csv, benchmark_matrix, derive_seed,
                    generate_planted, mixing_fraction, sweep)

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
STAGE_FILES = ("A", "W", "K", "L", "eigenvalues", "eigenvectors", "features")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _str_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _add_pipeline_flags(p, need_k=True):
    p.add_argument("--algo", default="scoreh+", choices=[v.value for v in Variant],
                   help="algorithm variant (default scoreh+)")
    if need_k:
        p.add_argument("--k", type=int, required=True, help="number of communities")
    p.add_argument("--rbf", default="gaussian", choices=[k.value for k in RbfKind])
    p.add_argument("--c", type=float, default=0.1, help="shaping parameter")
    p.add_argument("--auto-c", action="store_true",
                   help="choose c on a grid by minimising the condition number")
    p.add_argument("--beta", type=float, default=KatzConfig().beta, help="Katz decay")
    p.add_argument("--sigma", type=float, default=0.1, help="ridge regularisation")
    p.add_argument("--t", type=float, default=0.1, help="weak-signal threshold")
    p.add_argument("--ratio-mode", default="raw", choices=["raw", "weighted"])
    p.add_argument("--ratio-clamp", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=300)


def _pipeline_config(args, k=None) -> PipelineConfig:
    return PipelineConfig(
        variant=args.algo, k=args.k if k is None else k, sigma=args.sigma, t=args.t,
        rbf=RbfChoice(args.rbf, args.c), auto_c=args.auto_c,
        katz=KatzConfig(args.beta), ratio_mode=args.ratio_mode,
        ratio_clamp=args.ratio_clamp, restarts=args.restarts,
        max_iters=args.max_iters, seed=args.seed)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _clean(value):
    """Make a value JSON-safe: numpy scalars to Python, non-finite to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _load_graph(args):
    return read_graph(args.edges, getattr(args, "labels", None),
                      add_isolated=getattr(args, "allow_isolated", False))


def _inputs(args):
    out = {"edges": {"path": args.edges, "sha256": _digest(args.edges)}}
    if getattr(args, "labels", None):
        out["labels"] = {"path": args.labels, "sha256": _digest(args.labels)}
    return out


def _metrics(graph, labels):
    out = {"modularity": modularity(graph, labels) if graph.m else None}
    if graph.ground_truth is not None:
        out["nmi"] = nmi(graph.ground_truth, labels)
    return out


def write_stages(stages: dict, directory: str, node_order=None):
    """Write stage matrices as headerless, comma-separated CSV files."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for name in STAGE_FILES:
        if name not in stages:
            continue
        M = np.atleast_2d(np.asarray(stages[name], dtype=float))
        if name == "eigenvalues":
            M = M.reshape(1, -1)
        path = os.path.join(directory, f"{name}.csv")
        np.savetxt(path, M, delimiter=",", fmt="%.17g")
        written.append(path)
    if node_order is not None:
        path = os.path.join(directory, "nodes.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("".join(f"{tok}\n" for tok in node_order))
        written.append(path)
    return written


def run_detect(args, out=sys.stdout) -> int:
    graph = _load_graph(args)
    cfg = _pipeline_config(args)
    repeats = getattr(args, "repeats", 1)
    if repeats < 1:
        raise InputError("repeats must be at least 1", stage="config")
    dump_dir = getattr(args, "dump_stages", None)
    result = detect(graph, cfg, keep_stages=dump_dir is not None)
    metrics = _metrics(graph, result.labels)
    resolved = cfg.to_dict()
    if result.rbf is not None:
        resolved["rbf"] = {"kind": result.rbf.kind.value, "c": result.rbf.c}
    manifest = {
        "tool_version": __version__,
        "config": resolved,
        "inputs": _inputs(args),
        "graph": {"n": graph.n, "m": graph.m, "dropped_duplicates": graph.n_duplicates,
                  "dropped_self_loops": graph.n_self_loops},
        "node_order": list(result.node_order),
        "k_prime": result.k_prime,
        "condition_numbers": result.condition_numbers,
        "inertia": result.inertia,
        "timings": result.timings,
    }
    payload = {"labels": result.labels,
               "signal": None if result.signal is None else result.signal.to_dict(),
               "metrics": metrics, "manifest": manifest}
    if repeats > 1 or getattr(args, "repeats_given", False):
        runs = [metrics]
        for r in range(1, repeats):
            cfg_r = replace(cfg, seed=derive_seed(cfg.seed, r), diagnostics=False)
            runs.append(_metrics(graph, detect(graph, cfg_r).labels))
        agg = {}
        for key in runs[0]:
            vals = np.array([run[key] for run in runs], dtype=float)
            agg[key] = {"mean": float(vals.mean()), "variance": float(vals.var()),
                        "values": vals.tolist()}
        payload["aggregate"] = {"repeats": repeats, "metrics": agg,
                                "seeds": [cfg.seed] + [derive_seed(cfg.seed, r)
                                                       for r in range(1, repeats)]}
    if dump_dir is not None:
        manifest["stage_files"] = write_stages(result.stages, dump_dir, result.node_order)
    out.write(_dumps(payload))
    return 0


def _read_label_vector(path, graph):
    with open(path, encoding="utf-8") as fh:
        return attach_labels(graph, fh).ground_truth


def run_eval(args, out=sys.stdout) -> int:
    with open(args.edges, encoding="utf-8") as fh:
        graph = parse_edge_list(fh)
    pred = _read_label_vector(args.pred, graph)
    result = {"modularity": modularity(graph, pred)}
    if args.labels:
        result["nmi"] = nmi(_read_label_vector(args.labels, graph), pred)
    out.write(_dumps(result))
    return 0


def run_sweep(args, out=sys.stdout, err=sys.stderr) -> int:
    graph = _load_graph(args)
    k = args.k
    if k is None:
        if graph.ground_truth is None:
            raise InputError("--k is required without --labels", stage="config")
        k = int(graph.ground_truth.max()) + 1
    if args.grid:
        grid = args.grid
    else:
        grid = list(np.linspace(args.c_min, args.c_max, args.c_points))
    spec = SweepSpec(kinds=tuple(args.kinds), default_grid=tuple(grid),
                     objective=args.objective, repeats=args.repeats, seed=args.seed)
    result = sweep(graph, spec, _pipeline_config(args, k=k))
    text = result.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    best = result.best
    summary = None if best is None else {"kind": best.kind.value, "c": best.c,
                                         "mean": best.mean, "variance": best.variance}
    err.write(_dumps({"best": summary, "objective": spec.objective}))
    return 0


def run_bench(args, out=sys.stdout) -> int:
    configs = [(n, mu) for n in args.n for mu in args.mu]
    graphs = []
    if args.lfr_edges:
        if not args.lfr_labels:
            raise InputError("--lfr-edges needs --lfr-labels", stage="config")
        g = read_graph(args.lfr_edges, args.lfr_labels, add_isolated=True)
        graphs.append((g.n, mixing_fraction(g), g))
        if not args.n_given:
            configs = []
    base = _pipeline_config(args, k=2)
    rows = benchmark_matrix(configs, args.variants, repeats=args.repeats, base=base,
                            k=args.communities, avg_degree=args.avg_degree,
                            seed=args.seed, graphs=graphs)
    text = bench_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def run_generate(args, out=sys.stdout) -> int:
    g = generate_planted(PlantedConfig(n=args.n, k=args.communities,
                                       avg_degree=args.avg_degree, mu=args.mu,
                                       seed=args.seed))
    with open(args.edges_out, "w", encoding="utf-8") as fh:
        fh.write(serialize_edge_list(g))
    with open(args.labels_out, "w", encoding="utf-8") as fh:
        fh.write(serialize_labels(g))
    out.write(_dumps({"n": g.n, "m": g.m, "mixing_fraction": mixing_fraction(g),
                      "edges": args.edges_out, "labels": args.labels_out}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbfscore",
        description="Community detection by ratios of eigenvectors on RBF-weighted "
                    "Katz proximity.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect communities and print JSON")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", help="ground-truth labels, enables NMI")
    p.add_argument("--allow-isolated", action="store_true",
                   help="add label-file nodes missing from the edge list as isolated")
    p.add_argument("--dump-stages", metavar="DIR",
                   help="write intermediate matrices as CSV into DIR")
    p.add_argument("--repeats", type=int, default=1,
                   help="also report mean and variance over this many seeds")
    _add_pipeline_flags(p)
    p.set_defaults(func=run_detect)

    p = sub.add_parser("dump-stages", help="detect and write every stage as CSV")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels")
    p.add_argument("--allow-isolated", action="store_true")
    p.add_argument("--out", dest="dump_stages", required=True, metavar="DIR")
    _add_pipeline_flags(p)
    p.set_defaults(func=run_detect, repeats=1)

    p = sub.add_parser("eval", help="score a labelling: modularity and NMI")
    p.add_argument("--edges", required=True)
    p.add_argument("--pred", required=True, help="predicted labels file")
    p.add_argument("--labels", help="ground-truth labels file")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("sweep", help="grid search over RBF kinds and c")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels")
    p.add_argument("--allow-isolated", action="store_true")
    p.add_argument("--kinds", type=_str_list, default=["imq"])
    p.add_argument("--grid", type=_float_list, help="explicit comma-separated c values")
    p.add_argument("--c-min", type=float, default=0.001)
    p.add_argument("--c-max", type=float, default=0.1)
    p.add_argument("--c-points", type=int, default=100)
    p.add_argument("--objective", choices=["nmi", "modularity"], default="nmi")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--output", help="CSV path (default stdout)")
    _add_pipeline_flags(p, need_k=False)
    p.add_argument("--k", type=int, help="default: number of ground-truth labels")
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("bench", help="run variants on planted graphs, write CSV")
    p.add_argument("--n", type=_int_list, default=[150])
    p.add_argument("--mu", type=_float_list, default=[0.15])
    p.add_argument("--variants", type=_str_list,
                   default=["sc", "score", "score+", "scoreh+"])
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--lfr-edges", help="benchmark edge list (e.g. an LFR .nse file)")
    p.add_argument("--lfr-labels", help="benchmark labels (e.g. an LFR .nmc file)")
    p.add_argument("--output")
    _add_pipeline_flags(p, need_k=False)
    p.set_defaults(func=run_bench)

    p = sub.add_parser("generate", help="write a planted-partition graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges-out", required=True)
    p.add_argument("--labels-out", required=True)
    p.set_defaults(func=run_generate)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.command == "detect":
        args.repeats_given = "--repeats" in argv
    if args.command == "bench":
        args.n_given = "--n" in argv
    try:
        if args.command == "sweep":
            return args.func(args, out=out, err=err)
        return args.func(args, out=out)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        err.write(_dumps({"error": str(exc), "type": type(exc).__name__,
                          "stage": getattr(exc, "stage", None)}))
        return EXIT_NUMERICAL
    except (RbfScoreError, ValueError) as exc:
        err.write(_dumps({"error": str(exc), "type": type(exc).__name__,
                          "stage": getattr(exc, "stage", None)}))
        return EXIT_INPUT
    except OSError as exc:
        err.write(_dumps({"error": str(exc), "type": type(exc).__name__,
                          "stage": "io"}))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
