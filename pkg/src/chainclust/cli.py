"""Command-line front end: cluster, generate, sweep and constraints commands."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from .constraints import (ConstraintSet, corrupt_labels, from_labels,
                          propagate, read_constraint_file, sample_side_info,
                          violations, write_constraint_file)
from .data import generate_circles, load_csv, pca_reduce, write_csv, zscore_normalize
from .errors import ChainclustError
from .evaluation import ExperimentSpec, nmi, sweep, sweep_table
from .markov import aggregate_joint, build_transition, cost_terms, dump_model
from .solver import SolverConfig, solve_annealed, solve_sequential


def _add_data_args(p, label_required=False):
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--label-col", required=label_required,
                   help="name of the ground-truth label column")
    p.add_argument("--normalize", action="store_true",
                   help="z-score normalize the features")
    p.add_argument("--pca", type=int, metavar="DIMS",
                   help="reduce to DIMS principal components")


def _add_solver_args(p):
    p.add_argument("--K", type=int, help="number of clusters (default: number of classes)")
    p.add_argument("--k", type=int, default=20, help="neighbor count for the kernel scale")
    p.add_argument("--beta-target", type=float, default=0.5,
                   help="trade-off parameter (final value when annealing)")
    p.add_argument("--delta", type=float, default=0.05, help="annealing step size")
    p.add_argument("--iter-max", type=int, default=100, help="sweep limit per run")
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--runs", type=int, default=10, help="number of randomized runs")
    p.add_argument("--anneal", action=argparse.BooleanOptionalAction, default=True,
                   help="anneal beta from 1 down to the target")
    p.add_argument("--no-propagate-must", dest="propagate_must", action="store_false",
                   help="ablation: must-links are not propagated to cliques")
    p.add_argument("--no-cannot", dest="use_cannot", action="store_false",
                   help="ablation: drop every cannot-link")
    p.add_argument("--scale-power", type=int, choices=(1, 2), default=1,
                   help="power applied to the kNN scale in the kernel denominator")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainclust",
        description="Semi-supervised clustering via constrained Markov chain aggregation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a CSV dataset")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--constraints", help="constraint file with ML/CL lines")
    p.add_argument("--dump-model", metavar="DIR", help="write W/P/mu CSV dumps to DIR")
    p.add_argument("--output", "-o", help="output JSON path (default: stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("generate", help="write a synthetic circles dataset CSV")
    p.add_argument("--n-per-circle", type=int, default=60)
    p.add_argument("--radii", default="0.5,7,15", help="comma-separated ring radii")
    p.add_argument("--noise-std", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True, help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="sweep one parameter axis and emit a table")
    _add_data_args(p, label_required=True)
    _add_solver_args(p)
    p.add_argument("--axis", required=True,
                   choices=("k", "beta", "fraction", "noise", "n-constraints"))
    p.add_argument("--grid", required=True, help="comma-separated axis values")
    p.add_argument("--mode", choices=("all-classes", "two-classes"),
                   default="all-classes", help="side-information protocol")
    p.add_argument("--fraction", type=float, default=0.0,
                   help="labeled fraction (base value when not the sweep axis)")
    p.add_argument("--noise", type=float, default=0.0,
                   help="label noise level (base value when not the sweep axis)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("constraints", help="derive a pairwise constraint file from labels")
    _add_data_args(p, label_required=True)
    p.add_argument("--fraction", type=float, required=True,
                   help="fraction of points to label")
    p.add_argument("--mode", choices=("all-classes", "two-classes"),
                   default="all-classes")
    p.add_argument("--noise", type=float, default=0.0,
                   help="fraction of sampled labels to corrupt")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True, help="constraint file path")
    p.set_defaults(func=cmd_constraints)

    return parser


def _load_dataset(args):
    ds = load_csv(args.data, args.label_col)
    if args.normalize:
        ds = zscore_normalize(ds)
    if args.pca:
        ds = pca_reduce(ds, args.pca)
    return ds


def _emit(text: str, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_cluster(args) -> int:
    ds = _load_dataset(args)
    K = args.K if args.K is not None else ds.n_classes
    if K < 1:
        raise ValueError("number of clusters unknown: pass --K or --label-col")
    model = build_transition(ds.points, args.k, scale_power=args.scale_power)
    cs = read_constraint_file(args.constraints) if args.constraints else ConstraintSet()
    ci = propagate(cs, ds.n_points, propagate_must=args.propagate_must,
                   drop_cannot=not args.use_cannot)
    cfg = SolverConfig(K=K, beta_target=args.beta_target, delta=args.delta,
                       iter_max=args.iter_max, seed=args.seed, anneal=args.anneal)

    run_entries = []
    best = None
    for r in range(1, args.runs + 1):
        run_cfg = replace(cfg, seed=cfg.seed + r)
        if cfg.anneal:
            g, final_cost, trace = solve_annealed(model, ci, run_cfg)
            iters = len(trace)
        else:
            g, final_cost, iters = solve_sequential(model, ci, cfg.beta_target, run_cfg)
            trace = [(cfg.beta_target, final_cost)]
        must_v, cannot_v = violations(g, cs)
        entry = {"seed": run_cfg.seed, "cost": final_cost, "iters": iters,
                 "violations": {"must": must_v, "cannot": cannot_v}}
        if ds.labels is not None:
            entry["nmi"] = nmi(ds.labels, g)
        run_entries.append(entry)
        if best is None or final_cost < best[0]["cost"]:
            best = (entry, g, trace)

    best_entry, best_g, best_trace = best
    stats = aggregate_joint(model, best_g, K)
    terms = cost_terms(stats, model, best_g)
    result = {
        "config": {
            "data": args.data, "label_col": args.label_col,
            "normalize": args.normalize, "pca": args.pca,
            "constraints": args.constraints, "K": K, "k": args.k,
            "beta_target": args.beta_target, "delta": args.delta,
            "iter_max": args.iter_max, "seed": args.seed, "runs": args.runs,
            "anneal": args.anneal, "propagate_must": args.propagate_must,
            "use_cannot": args.use_cannot, "scale_power": args.scale_power,
        },
        "sigma_k": model.sigma_k,
        "runs": run_entries,
        "assignments": best_g.assign.tolist(),
        "cost": best_entry["cost"],
        "cost_terms": {"h_cond_agg": terms.h_cond_agg,
                       "h_cond_full": terms.h_cond_full,
                       "mutual_info": terms.mutual_info},
        "violations": best_entry["violations"],
        "stage_trace": [[b, c] for b, c in best_trace],
    }
    if ds.labels is not None:
        nmis = [e["nmi"] for e in run_entries]
        result["nmi"] = best_entry["nmi"]
        result["nmi_mean"] = sum(nmis) / len(nmis)
        result["nmi_std"] = float((sum((v - result["nmi_mean"]) ** 2 for v in nmis)
                                   / len(nmis)) ** 0.5)
    if args.dump_model:
        dump_model(model, args.dump_model)
    _emit(json.dumps(result, indent=2) + "\n", args.output)
    return 0


def cmd_generate(args) -> int:
    radii = [float(v) for v in args.radii.split(",") if v.strip()]
    ds = generate_circles(args.n_per_circle, radii, args.noise_std, args.seed)
    write_csv(ds, args.output)
    return 0


def cmd_sweep(args) -> int:
    ds = _load_dataset(args)
    if ds.labels is None:
        raise ValueError("sweep requires a label column")
    K = args.K if args.K is not None else ds.n_classes
    axis = args.axis.replace("-", "_")
    experiment = ExperimentSpec(mode=args.mode.replace("-", "_"),
                                fraction=args.fraction, noise=args.noise,
                                k=args.k, scale_power=args.scale_power,
                                propagate_must=args.propagate_must,
                                use_cannot=args.use_cannot)
    cfg = SolverConfig(K=K, beta_target=args.beta_target, delta=args.delta,
                       iter_max=args.iter_max, seed=args.seed, anneal=args.anneal)
    grid = [float(v) for v in args.grid.split(",") if v.strip()]
    summaries = sweep(ds, axis, grid, experiment, cfg, runs=args.runs)
    if args.format == "json":
        _emit(json.dumps([s.to_dict() for s in summaries], indent=2) + "\n", args.output)
    else:
        rows = sweep_table(axis, grid, summaries)
        if args.output:
            with open(args.output, "w", newline="", encoding="utf-8") as fh:
                csv.writer(fh).writerows(rows)
        else:
            csv.writer(sys.stdout).writerows(rows)
    return 0


def cmd_constraints(args) -> int:
    ds = _load_dataset(args)
    if ds.labels is None:
        raise ValueError("constraint generation requires a label column")
    side = sample_side_info(ds.labels, args.fraction,
                            args.mode.replace("-", "_"), seed=(args.seed, 1))
    if args.noise > 0 and side:
        side = corrupt_labels(side, args.noise, ds.n_classes, seed=(args.seed, 2))
    write_constraint_file(args.output, from_labels(side))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ChainclustError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal invariant failures
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry_point():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entry_point()
