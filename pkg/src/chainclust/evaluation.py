"""Clustering accuracy (NMI) and the multi-run experiment harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import xlogy

from .constraints import (corrupt_labels, from_labels, propagate, sample_pairs,
                          sample_side_info, violations)
from .data import Dataset
from .errors import ShapeError
from .markov import build_transition
from .partition import Partition
from .solver import SolverConfig, solve_annealed, solve_sequential


def _labels_of(g):
    if isinstance(g, Partition):
        return g.assign
    return np.asarray(g, dtype=int)


def _phi_terms(p: np.ndarray) -> list:
    terms = np.where(p > 0.0, xlogy(p, p), 0.0)
    return terms.ravel().tolist()


def nmi(g_true, g_est) -> float:
    """Normalized mutual information 2I/(H+H) between two partitions.

    Plug-in estimates over the uniform distribution on points; 1 for
    identical partitions, 0 for independent ones. Two constant partitions
    compare as 1, a constant against a non-constant one as 0.
    """
    a = _labels_of(g_true)
    b = _labels_of(g_est)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ShapeError(f"partition lengths differ: {a.shape} vs {b.shape}")
    n = a.size
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(table, (ia, ib), 1.0)
    pxy = table / n
    # marginals from the integer counts: sums of integer-valued floats are
    # exact, which keeps NMI bitwise invariant under relabeling
    px = table.sum(axis=1) / n
    py = table.sum(axis=0) / n
    phi_xy = _phi_terms(pxy)
    phi_x = _phi_terms(px)
    phi_y = _phi_terms(py)
    h_true = -math.fsum(phi_x)
    h_est = -math.fsum(phi_y)
    if h_true == 0.0 and h_est == 0.0:
        return 1.0
    if h_true == 0.0 or h_est == 0.0:
        return 0.0
    # single exactly-rounded sums keep the result bitwise symmetric in the
    # two arguments and invariant under cluster relabeling
    mutual = math.fsum(phi_xy + [-t for t in phi_x] + [-t for t in phi_y])
    denom = -math.fsum(phi_x + phi_y)
    return float(min(max(2.0 * mutual / denom, 0.0), 1.0))


@dataclass(frozen=True)
class ExperimentSpec:
    """How side information is generated and the chain is built per run.

    mode: 'all_classes' or 'two_classes' sample partition-level labels that
    are converted to exhaustive pairwise constraints; 'pairs' draws a
    fraction (relative to N) of raw ground-truth pairs directly. noise is
    the share of sampled labels replaced by wrong ones. propagate_must /
    use_cannot are the two ablation switches.
    """

    mode: str = "all_classes"
    fraction: float = 0.0
    noise: float = 0.0
    k: int = 20
    scale_power: int = 1
    propagate_must: bool = True
    use_cannot: bool = True


@dataclass
class RunSummary:
    """Aggregated results of repeated randomized runs of one configuration."""

    nmi_mean: float
    nmi_std: float
    cost_mean: float
    violations_mean: float
    per_run: list          # (seed, nmi, cost, iters) per run
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "nmi_mean": self.nmi_mean,
            "nmi_std": self.nmi_std,
            "cost_mean": self.cost_mean,
            "violations_mean": self.violations_mean,
            "per_run": [list(r) for r in self.per_run],
            "config": dict(self.config),
        }


def _constraints_for_run(labels, experiment: ExperimentSpec, seed_r: int):
    if experiment.mode == "pairs":
        count = int(np.floor(experiment.fraction * labels.size + 0.5))
        return sample_pairs(labels, count, seed=(seed_r, 1))
    side = sample_side_info(labels, experiment.fraction, experiment.mode,
                            seed=(seed_r, 1))
    if experiment.noise > 0 and side:
        side = corrupt_labels(side, experiment.noise, int(labels.max()),
                              seed=(seed_r, 2))
    return from_labels(side)


def run_experiment(dataset: Dataset, experiment: ExperimentSpec,
                   cfg: SolverConfig, runs: int = 10) -> RunSummary:
    """Repeat the full pipeline `runs` times with derived seeds.

    Each run resamples side information with seed cfg.seed + r, converts it
    to constraints, solves (annealed or sequential per cfg.anneal) and
    scores the result against the ground truth.
    """
    if dataset.labels is None:
        raise ValueError("run_experiment needs a dataset with ground-truth labels")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    model = build_transition(dataset.points, experiment.k,
                             scale_power=experiment.scale_power)
    labels = dataset.labels
    per_run = []
    violation_counts = []
    for r in range(1, runs + 1):
        seed_r = cfg.seed + r
        cs = _constraints_for_run(labels, experiment, seed_r)
        ci = propagate(cs, dataset.n_points,
                       propagate_must=experiment.propagate_must,
                       drop_cannot=not experiment.use_cannot)
        run_cfg = replace(cfg, seed=seed_r)
        if cfg.anneal:
            g, final_cost, trace = solve_annealed(model, ci, run_cfg)
            iters = len(trace)
        else:
            g, final_cost, iters = solve_sequential(model, ci, cfg.beta_target, run_cfg)
        must_v, cannot_v = violations(g, cs)
        per_run.append((seed_r, nmi(labels, g), final_cost, iters))
        violation_counts.append(must_v + cannot_v)

    nmis = np.array([r[1] for r in per_run])
    costs = np.array([r[2] for r in per_run])
    config = {
        "dataset": dataset.name,
        "n_points": dataset.n_points,
        "mode": experiment.mode,
        "fraction": experiment.fraction,
        "noise": experiment.noise,
        "k": experiment.k,
        "scale_power": experiment.scale_power,
        "propagate_must": experiment.propagate_must,
        "use_cannot": experiment.use_cannot,
        "K": cfg.K,
        "beta_target": cfg.beta_target,
        "delta": cfg.delta,
        "iter_max": cfg.iter_max,
        "seed": cfg.seed,
        "anneal": cfg.anneal,
        "runs": runs,
    }
    return RunSummary(
        nmi_mean=float(nmis.mean()),
        nmi_std=float(nmis.std()),
        cost_mean=float(costs.mean()),
        violations_mean=float(np.mean(violation_counts)),
        per_run=per_run,
        config=config,
    )


_SWEEP_AXES = ("k", "beta", "fraction", "noise", "n_constraints")


def sweep(dataset: Dataset, axis: str, grid, experiment: ExperimentSpec,
          cfg: SolverConfig, runs: int = 10) -> list:
    """Run one experiment per grid value, varying only the named axis."""
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    if axis not in _SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}, expected one of {_SWEEP_AXES}")
    summaries = []
    for value in grid:
        exp_v, cfg_v = experiment, cfg
        if axis == "k":
            exp_v = replace(experiment, k=int(value))
        elif axis == "fraction":
            exp_v = replace(experiment, fraction=float(value))
        elif axis == "noise":
            exp_v = replace(experiment, noise=float(value))
        elif axis == "n_constraints":
            exp_v = replace(experiment, mode="pairs", fraction=float(value))
        elif axis == "beta":
            cfg_v = replace(cfg, beta_target=float(value))
        summary = run_experiment(dataset, exp_v, cfg_v, runs=runs)
        summary.config["axis"] = axis
        summary.config["value"] = value
        summaries.append(summary)
    return summaries


def sweep_table(axis: str, grid, summaries) -> list:
    """Rows for a CSV export: one per (grid value, run) plus aggregate rows."""
    rows = [["axis", "value", "run", "seed", "nmi", "cost", "iters"]]
    for value, summary in zip(grid, summaries):
        for run_idx, (seed, run_nmi, run_cost, iters) in enumerate(summary.per_run, start=1):
            rows.append([axis, value, run_idx, seed, run_nmi, run_cost, iters])
        rows.append([axis, value, "mean", "", summary.nmi_mean, summary.cost_mean, ""])
        rows.append([axis, value, "std", "", summary.nmi_std, "", ""])
    return rows
