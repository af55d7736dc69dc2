"""Shared test utilities: independent oracles and instance generators.

The oracles here deliberately avoid the code paths they check: stationary
distributions come from power iteration, mutual informations from explicit
joint tables, minimum costs from exhaustive enumeration and NMI from a
plain dictionary-based contingency count.
"""

import itertools
import math

import numpy as np

from chainclust import (Partition, aggregate_joint, build_from_weights,
                        build_transition, cost, violations)


def random_points_model(rng, n=None, dim=2, k=None):
    n = int(rng.integers(4, 13)) if n is None else n
    pts = rng.normal(size=(n, dim))
    k = int(rng.integers(1, n)) if k is None else k
    return build_transition(pts, k)


def random_partition(rng, n, K):
    return Partition(rng.integers(1, K + 1, size=n), K)


def block_weight_matrix(rng, sizes, cross_max=0.01):
    """Well-separated blocks: weight 1.0 inside, <= cross_max across."""
    n = sum(sizes)
    w = rng.uniform(0.001, cross_max, size=(n, n))
    w = (w + w.T) / 2.0
    start = 0
    for size in sizes:
        w[start:start + size, start:start + size] = 1.0
        start += size
    return w


def block_model(rng, sizes, cross_max=0.01):
    return build_from_weights(block_weight_matrix(rng, sizes, cross_max))


def full_cost(model, assign, K, beta):
    g = Partition(np.asarray(assign, dtype=int), K)
    return cost(aggregate_joint(model, g), model, g, beta)


def enumerate_best(model, K, beta, cs=None):
    """Exhaustive minimum over all K-partitions (first point pinned to
    cluster 1; cost and feasibility are invariant under relabeling)."""
    n = model.n_points
    best_cost, best_assign = np.inf, None
    for tail in itertools.product(range(1, K + 1), repeat=n - 1):
        assign = np.array((1,) + tail, dtype=int)
        if cs is not None:
            g = Partition(assign, K)
            mv, cv = violations(g, cs)
            if mv or cv:
                continue
        c = full_cost(model, assign, K, beta)
        if c < best_cost:
            best_cost, best_assign = c, assign
    return best_cost, best_assign


def power_iteration_mu(P, steps, tol=1e-13):
    """Stationary distribution by plain power iteration: at least `steps`
    iterations, then continue until successive iterates agree to tol."""
    v = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(steps):
        v = v @ P
    for _ in range(200000):
        nxt = v @ P
        done = np.max(np.abs(nxt - v)) < tol
        v = nxt
        if done:
            break
    return v


def mutual_info_x1_x2(model):
    """I(X1;X2) straight from mu and P."""
    joint = model.mu[:, None] * model.P
    pj = joint.sum(axis=0)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log(joint[mask]
                                             / (model.mu[:, None] * pj[None, :])[mask])))


def _plugin_mi(joint):
    joint = np.asarray(joint, dtype=float)
    rows = joint.sum(axis=1)
    cols = joint.sum(axis=0)
    mask = joint > 0
    outer = rows[:, None] * cols[None, :]
    return float(np.sum(joint[mask] * np.log(joint[mask] / outer[mask])))


def mutual_info_y1_x2(model, g):
    """I(g(X1); X2) from the explicit joint table."""
    K = g.K
    onehot = np.zeros((model.n_points, K))
    onehot[np.arange(model.n_points), g.assign - 1] = 1.0
    joint = onehot.T @ (model.mu[:, None] * model.P)
    return _plugin_mi(joint)


def mutual_info_y2_x1(model, g):
    """I(g(X2); X1) from the explicit joint table."""
    K = g.K
    onehot = np.zeros((model.n_points, K))
    onehot[np.arange(model.n_points), g.assign - 1] = 1.0
    joint = model.mu[:, None] * (model.P @ onehot)
    return _plugin_mi(joint)


def naive_nmi(a, b):
    """Contingency-table NMI with plain dicts and math.log."""
    a = list(a)
    b = list(b)
    n = len(a)
    joint, pa, pb = {}, {}, {}
    for x, y in zip(a, b):
        joint[(x, y)] = joint.get((x, y), 0) + 1
        pa[x] = pa.get(x, 0) + 1
        pb[y] = pb.get(y, 0) + 1
    ha = -sum(c / n * math.log(c / n) for c in pa.values() if c)
    hb = -sum(c / n * math.log(c / n) for c in pb.values() if c)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    mi = sum(c / n * math.log((c / n) / ((pa[x] / n) * (pb[y] / n)))
             for (x, y), c in joint.items() if c)
    return 2.0 * mi / (ha + hb)


def load_iris_dataset():
    from sklearn.datasets import load_iris

    from chainclust import Dataset
    raw = load_iris()
    return Dataset(raw.data, raw.target + 1, list(raw.feature_names), "iris")
