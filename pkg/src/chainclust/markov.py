"""Markov chain construction and the information-theoretic aggregation cost.

A dataset is turned into a reversible chain over its points: symmetric
Gaussian similarities W, row-normalized transitions P and the stationary
distribution mu (proportional to the row sums of W). Partitions of the
point set are scored by

    cost = (1 - 2*beta) * (H(Y2|Y1) - H(Y2|X1)) - beta * I(Y1;Y2)

where X1 -> X2 is one step of the chain and Y = g(X) is the aggregated
label process. All entropies use natural logarithms, 0*log(0) = 0.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform
from scipy.special import xlogy

from .errors import DegenerateScale
from .partition import Partition


def _phi(a) -> np.ndarray:
    """Elementwise x*log(x) with non-positive entries mapped to zero."""
    a = np.asarray(a, dtype=float)
    return np.where(a > 0.0, xlogy(a, a), 0.0)


@dataclass(frozen=True)
class TransitionModel:
    """Reversible Markov chain derived from pairwise similarities.

    W : (N, N) symmetric non-negative weights, unit diagonal when built
        from the Gaussian kernel.
    P : row-stochastic transitions, P[i, j] = W[i, j] / sum_j W[i, j].
    mu : stationary distribution, proportional to the row sums of W.
    sigma_k : kernel scale (mean squared kNN distance).
    k : neighbor count used to derive sigma_k.
    """

    W: np.ndarray
    P: np.ndarray
    mu: np.ndarray
    sigma_k: float
    k: int

    @property
    def n_points(self) -> int:
        return self.W.shape[0]


def knn_scale(points, k: int) -> float:
    """Mean over all points of the mean squared distance to the k nearest neighbors.

    Self-distances are excluded and ties are broken toward the smaller index.
    k larger than N-1 is clamped with a warning. A zero result (every point
    duplicated at least k times) raises DegenerateScale.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n - 1:
        warnings.warn(f"k={k} exceeds N-1={n - 1}; clamping to {n - 1}", stacklevel=2)
        k = n - 1
    d2 = squareform(pdist(pts, "sqeuclidean"))
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    nearest = np.take_along_axis(d2, order, axis=1)
    scale = float(nearest.mean())
    if scale == 0.0:
        raise DegenerateScale(
            "all k nearest neighbors are duplicates; supply an explicit scale override")
    return scale


def build_transition(points, k: int,
                     scale_override: float | None = None,
                     scale_power: int = 1) -> TransitionModel:
    """Build the Gaussian-kernel chain W[i, j] = exp(-||xi - xj||^2 / s**scale_power).

    s is the kNN-derived scale from knn_scale unless scale_override is given.
    The diagonal keeps its exp(0) = 1 self-loops, which makes the chain
    aperiodic. mu comes from the closed form sum_j W[i, j] / sum_ij W[i, j].
    """
    pts = np.asarray(points, dtype=float)
    if scale_override is not None:
        if scale_override <= 0:
            raise ValueError("scale_override must be positive")
        scale = float(scale_override)
    else:
        scale = knn_scale(pts, k)
    d2 = squareform(pdist(pts, "sqeuclidean"))
    w = np.exp(-d2 / scale ** scale_power)
    return build_from_weights(w, sigma_k=scale, k=k)


def build_from_weights(w, sigma_k: float = 1.0, k: int = 0) -> TransitionModel:
    """Wrap an explicit symmetric weight matrix as a TransitionModel."""
    w = np.array(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weight matrix must be square")
    if not np.array_equal(w, w.T):
        raise ValueError("weight matrix must be symmetric")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    row_sums = w.sum(axis=1)
    if np.any(row_sums <= 0):
        raise ValueError("every row of the weight matrix must have positive sum")
    p = w / row_sums[:, None]
    mu = row_sums / row_sums.sum()
    return TransitionModel(W=w, P=p, mu=mu, sigma_k=float(sigma_k), k=int(k))


def dump_model(model: TransitionModel, directory) -> None:
    """Write W, P and mu as CSV files into the given directory (debug aid)."""
    os.makedirs(directory, exist_ok=True)
    np.savetxt(os.path.join(directory, "W.csv"), model.W, delimiter=",")
    np.savetxt(os.path.join(directory, "P.csv"), model.P, delimiter=",")
    np.savetxt(os.path.join(directory, "mu.csv"), model.mu, delimiter=",")


@dataclass
class AggregateStats:
    """Joint statistics of the aggregated pair (Y1, Y2) for one partition.

    Q : (K, K) joint distribution, Q[y, y'] = sum_{i in y} mu_i * point_rows[i, y'].
    row_marginal / col_marginal : the two marginals of Q (equal for
        reversible chains, up to floating-point noise).
    point_rows : (N, K) rows Pr(Y2 = y' | X1 = i).
    cluster_mass : stationary mass per cluster.

    Mutable on purpose: an optimization run owns its copy and updates it
    incrementally via apply_move.
    """

    Q: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    point_rows: np.ndarray
    cluster_mass: np.ndarray

    def copy(self) -> "AggregateStats":
        return AggregateStats(self.Q.copy(), self.row_marginal.copy(),
                              self.col_marginal.copy(), self.point_rows.copy(),
                              self.cluster_mass.copy())


class CostTerms(NamedTuple):
    h_cond_agg: float    # H(Y2 | Y1)
    h_cond_full: float   # H(Y2 | X1)
    mutual_info: float   # I(Y1 ; Y2)


def aggregate_joint(model: TransitionModel, g: Partition, K: int | None = None) -> AggregateStats:
    """Aggregate the chain under partition g. Empty clusters get zero mass."""
    if K is None:
        K = g.K
    idx = g.assign - 1
    n = model.n_points
    onehot = np.zeros((n, K))
    onehot[np.arange(n), idx] = 1.0
    point_rows = model.P @ onehot
    weighted = model.mu[:, None] * point_rows
    q = onehot.T @ weighted
    return AggregateStats(
        Q=q,
        row_marginal=q.sum(axis=1),
        col_marginal=q.sum(axis=0),
        point_rows=point_rows,
        cluster_mass=onehot.T @ model.mu,
    )


def cost_terms(stats: AggregateStats, model: TransitionModel, g: Partition) -> CostTerms:
    """The three information terms entering the aggregation cost, in nats."""
    phi_q = _phi(stats.Q).sum()
    phi_row = _phi(stats.row_marginal).sum()
    phi_col = _phi(stats.col_marginal).sum()
    h_cond_agg = phi_row - phi_q
    h_cond_full = -float((model.mu[:, None] * _phi(stats.point_rows)).sum())
    mutual_info = phi_q - phi_row - phi_col
    return CostTerms(float(h_cond_agg), h_cond_full, float(mutual_info))


def cost(stats: AggregateStats, model: TransitionModel, g: Partition, beta: float) -> float:
    """Aggregation cost (1 - 2*beta)(H(Y2|Y1) - H(Y2|X1)) - beta * I(Y1;Y2)."""
    h_agg, h_full, mi = cost_terms(stats, model, g)
    return (1.0 - 2.0 * beta) * (h_agg - h_full) - beta * mi


def _move_updates(stats, model, g, members, src, target):
    """Shared pieces of a clique move: column mass v, row contribution r,
    post-move per-cluster weights w and the moved stationary mass."""
    a, b = src - 1, target - 1
    mu = model.mu
    v = model.P[:, members].sum(axis=1)
    r = mu[members] @ stats.point_rows[members, :]
    w = np.bincount(g.assign - 1, weights=mu * v, minlength=stats.Q.shape[0])
    s_mass = float(mu[members] @ v[members])
    w[a] -= s_mass
    w[b] += s_mass
    moved_mass = float(mu[members].sum())
    return a, b, v, r, w, moved_mass


def move_delta(stats: AggregateStats, model: TransitionModel, g: Partition,
               clique, target: int, beta: float) -> float:
    """Exact cost change of moving a whole clique to `target`, computed
    incrementally from the affected rows and columns of Q and point_rows.

    All clique members must currently share one cluster. Moving to the
    current cluster returns exactly 0.
    """
    members = np.asarray(sorted(clique), dtype=int)
    src = int(g.assign[members[0]])
    if np.any(g.assign[members] != src):
        raise ValueError("clique members must share one cluster before the move")
    if target == src:
        return 0.0
    a, b, v, r, w, moved_mass = _move_updates(stats, model, g, members, src, target)

    q_new = stats.Q.copy()
    q_new[a, :] -= r
    q_new[b, :] += r
    q_new[:, a] -= w
    q_new[:, b] += w
    row_new = stats.row_marginal.copy()
    row_new[a] -= moved_mass
    row_new[b] += moved_mass
    col_new = stats.col_marginal.copy()
    w_total = float(w.sum())
    col_new[a] -= w_total
    col_new[b] += w_total

    d_phi_q = _phi(q_new).sum() - _phi(stats.Q).sum()
    d_phi_row = _phi(row_new).sum() - _phi(stats.row_marginal).sum()
    d_phi_col = _phi(col_new).sum() - _phi(stats.col_marginal).sum()
    d_h_agg = d_phi_row - d_phi_q
    d_mi = d_phi_q - d_phi_row - d_phi_col

    old_a = stats.point_rows[:, a]
    old_b = stats.point_rows[:, b]
    d_h_full = -float(model.mu @ (_phi(old_a - v) + _phi(old_b + v)
                                  - _phi(old_a) - _phi(old_b)))
    return (1.0 - 2.0 * beta) * (d_h_agg - d_h_full) - beta * d_mi


def apply_move(stats: AggregateStats, model: TransitionModel, g: Partition,
               clique, target: int) -> None:
    """Move a clique to `target`, updating stats and g in place.

    Only the affected rows/columns of Q, the two point_rows columns and the
    per-cluster masses are touched; the update matches what aggregate_joint
    would produce up to floating-point noise.
    """
    members = np.asarray(sorted(clique), dtype=int)
    src = int(g.assign[members[0]])
    if np.any(g.assign[members] != src):
        raise ValueError("clique members must share one cluster before the move")
    if target == src:
        return
    a, b, v, r, w, moved_mass = _move_updates(stats, model, g, members, src, target)
    stats.Q[a, :] -= r
    stats.Q[b, :] += r
    stats.Q[:, a] -= w
    stats.Q[:, b] += w
    stats.row_marginal[a] -= moved_mass
    stats.row_marginal[b] += moved_mass
    w_total = float(w.sum())
    stats.col_marginal[a] -= w_total
    stats.col_marginal[b] += w_total
    stats.point_rows[:, a] -= v
    stats.point_rows[:, b] += v
    stats.cluster_mass[a] -= moved_mass
    stats.cluster_mass[b] += moved_mass
    g.assign[members] = target
