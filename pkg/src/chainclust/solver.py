"""Constraint-respecting local search for the aggregation cost.

solve_sequential sweeps over the points Hartigan-style: each point's whole
must-link clique is moved to the admissible cluster with the lowest cost,
evaluated incrementally. solve_annealed chains sequential runs from beta=1
down to a target beta, warm-starting each stage with the previous result to
escape the poor local minima that plague small beta values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import CliqueIndex, func_cannot, func_must, greedy_coloring
from .errors import InvalidInitialization
from .markov import (TransitionModel, aggregate_joint, apply_move, cost,
                     move_delta)
from .partition import Partition

# Moves are accepted only when they beat this margin, so exact ties keep the
# current assignment and the cost never increases on voluntary moves.
_TIE_EPS = 1e-12


@dataclass
class SolverConfig:
    """Settings shared by the sequential and annealed solvers.

    K           number of clusters.
    beta_target final trade-off parameter in [0, 1].
    delta       annealing step size.
    iter_max    sweep limit per sequential run.
    seed        drives the greedy-coloring initialization (and the optional
                per-sweep shuffling).
    anneal      whether cluster runs use the annealing schedule.
    shuffle     visit points in random order instead of ascending index.
    """

    K: int
    beta_target: float = 0.5
    delta: float = 0.05
    iter_max: int = 100
    seed: int = 0
    anneal: bool = True
    shuffle: bool = False

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if not 0.0 <= self.beta_target <= 1.0:
            raise ValueError("beta_target must lie in [0, 1]")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")
        if self.iter_max < 1:
            raise ValueError("iter_max must be at least 1")


def _check_initialization(ci: CliqueIndex, g: Partition, K: int) -> None:
    if g.n_points != ci.n_points:
        raise InvalidInitialization(
            f"initial partition covers {g.n_points} points, expected {ci.n_points}")
    if g.K != K:
        raise InvalidInitialization(f"initial partition has K={g.K}, expected {K}")
    for members in ci.members:
        if members.size > 1 and np.unique(g.assign[members]).size > 1:
            raise InvalidInitialization(
                f"must-link clique {members.tolist()} spans several clusters")


def _composite_delta(stats, model, g, members, target, beta):
    # Clique members may sit in different clusters (primitive propagation
    # mode); compose homogeneous sub-moves on scratch copies.
    scratch_stats = stats.copy()
    scratch_g = g.copy()
    total = 0.0
    for src in np.unique(scratch_g.assign[members]):
        if src == target:
            continue
        group = members[scratch_g.assign[members] == src]
        total += move_delta(scratch_stats, model, scratch_g, group, target, beta)
        apply_move(scratch_stats, model, scratch_g, group, target)
    return total


def _apply_composite(stats, model, g, members, target):
    for src in np.unique(g.assign[members]):
        if src == target:
            continue
        group = members[g.assign[members] == src]
        apply_move(stats, model, g, group, target)


def solve_sequential(model: TransitionModel, ci: CliqueIndex, beta: float,
                     cfg: SolverConfig, g_init: Partition | None = None):
    """One Hartigan-style run at a fixed beta.

    Sweeps repeat until a full sweep changes nothing or cfg.iter_max is hit.
    Per point: the candidate clusters are those free of the point's
    cannot-partners (falling back to the least-occupied ones when every
    cluster is blocked); the whole must-link clique moves to the candidate
    with the smallest incremental cost. Ties keep the current cluster.

    Returns (partition, final_cost, sweeps).
    """
    n = model.n_points
    K = cfg.K
    rng = np.random.default_rng(cfg.seed)
    if g_init is None:
        g, _ = greedy_coloring(ci, K, seed=rng)
    else:
        _check_initialization(ci, g_init, K)
        g = g_init.copy()

    must_of = [func_must(ci, x) for x in range(n)]
    cannot_of = [func_cannot(ci, x) for x in range(n)]

    stats = aggregate_joint(model, g, K)
    all_clusters = np.arange(1, K + 1)
    sweeps = 0
    while sweeps < cfg.iter_max:
        order = np.arange(n)
        if cfg.shuffle:
            rng.shuffle(order)
        processed = np.zeros(n, dtype=bool)
        changed = False
        for x in order:
            if processed[x]:
                continue
            clique = must_of[x]
            processed[clique] = True
            blocked = g.assign[cannot_of[x]]
            if blocked.size:
                free = np.setdiff1d(all_clusters, blocked)
                if free.size:
                    candidates = free
                else:
                    counts = np.bincount(blocked, minlength=K + 1)[1:]
                    candidates = all_clusters[counts == counts.min()]
            else:
                candidates = all_clusters
            current = int(g.assign[x])
            homogeneous = bool(np.all(g.assign[clique] == current))
            if homogeneous:
                deltas = [move_delta(stats, model, g, clique, int(y), beta)
                          for y in candidates]
            else:
                deltas = [_composite_delta(stats, model, g, clique, int(y), beta)
                          for y in candidates]
            best = min(deltas)
            cands = candidates.tolist()
            if homogeneous and current in cands and best >= -_TIE_EPS:
                choice = current
            elif not homogeneous and current in cands and deltas[cands.index(current)] <= best + _TIE_EPS:
                choice = current
            else:
                choice = int(candidates[int(np.argmin(deltas))])
            if np.any(g.assign[clique] != choice):
                _apply_composite(stats, model, g, clique, choice)
                changed = True
        # resynchronize to bound incremental floating-point drift
        stats = aggregate_joint(model, g, K)
        sweeps += 1
        if not changed:
            break
    return g, cost(stats, model, g, beta), sweeps


def solve_annealed(model: TransitionModel, ci: CliqueIndex, cfg: SolverConfig):
    """Annealing schedule: solve at beta=1, then step beta down by cfg.delta
    to cfg.beta_target, warm-starting every stage with the previous partition.

    Returns (partition, final_cost, stage_trace) where stage_trace lists
    (beta, cost) per stage.
    """
    if not cfg.anneal:
        raise ValueError("solve_annealed requires cfg.anneal=True")
    g, stage_cost, _ = solve_sequential(model, ci, 1.0, cfg)
    trace = [(1.0, stage_cost)]
    beta = 1.0
    while beta > cfg.beta_target:
        beta = max(beta - cfg.delta, cfg.beta_target)
        g, stage_cost, _ = solve_sequential(model, ci, beta, cfg, g_init=g)
        trace.append((beta, stage_cost))
    return g, stage_cost, trace
