"""Pairwise must-link / cannot-link constraints and their propagation.

Must-link pairs are propagated into cliques (connected components of the
must-link graph, found by depth-first traversal); cannot-link pairs are
lifted to the clique level. Side-information helpers convert partial,
possibly noisy class labels into exhaustive pairwise constraints, and a
greedy coloring produces constraint-feasible initial partitions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (ContradictoryConstraints, InfeasibleSideInfo,
                     NoIncorrectLabelAvailable, ParseError)
from .partition import Partition


def _norm_pair(pair):
    i, j = int(pair[0]), int(pair[1])
    if i == j:
        raise ValueError(f"self-pair ({i}, {i}) is not a valid constraint")
    return (i, j) if i < j else (j, i)


@dataclass
class ConstraintSet:
    """Unordered must-link and cannot-link point-index pairs."""

    must: set = field(default_factory=set)
    cannot: set = field(default_factory=set)

    def __post_init__(self):
        self.must = {_norm_pair(p) for p in self.must}
        self.cannot = {_norm_pair(p) for p in self.cannot}
        overlap = self.must & self.cannot
        if overlap:
            raise ValueError(f"pairs listed as both must and cannot: {sorted(overlap)[:5]}")

    def __len__(self):
        return len(self.must) + len(self.cannot)


@dataclass
class CliqueIndex:
    """Propagated view of a ConstraintSet over n_points points.

    component_of maps every point to its clique id; unconstrained points sit
    in singleton cliques. Clique ids are ordered by smallest member index.
    cannot_adj is the symmetric clique-level cannot relation. must_neighbors
    keeps the explicit (unpropagated) must partners for the primitive
    propagation mode.
    """

    n_points: int
    component_of: np.ndarray
    members: list
    cannot_adj: list
    must_neighbors: list
    propagate_must: bool = True

    @property
    def n_cliques(self) -> int:
        return len(self.members)


def propagate(cs: ConstraintSet, n_points: int,
              propagate_must: bool = True,
              drop_cannot: bool = False) -> CliqueIndex:
    """Build the clique index for a constraint set.

    propagate_must=False switches func_must to the primitive behavior that
    only reports explicit partners (the cliques themselves are still built,
    e.g. for initial coloring). drop_cannot=True ignores every cannot-link.
    A cannot pair falling inside one clique raises ContradictoryConstraints.
    """
    must_neighbors = [set() for _ in range(n_points)]
    for i, j in cs.must:
        if not (0 <= i < n_points and 0 <= j < n_points):
            raise ValueError(f"constraint point index out of range: ({i}, {j})")
        must_neighbors[i].add(j)
        must_neighbors[j].add(i)

    component_of = np.full(n_points, -1, dtype=int)
    members = []
    for start in range(n_points):
        if component_of[start] >= 0:
            continue
        cid = len(members)
        stack = [start]
        component_of[start] = cid
        comp = [start]
        while stack:
            node = stack.pop()
            for nxt in must_neighbors[node]:
                if component_of[nxt] < 0:
                    component_of[nxt] = cid
                    comp.append(nxt)
                    stack.append(nxt)
        members.append(np.array(sorted(comp), dtype=int))

    cannot_adj = [set() for _ in members]
    if not drop_cannot:
        for i, j in cs.cannot:
            if not (0 <= i < n_points and 0 <= j < n_points):
                raise ValueError(f"constraint point index out of range: ({i}, {j})")
            ci, cj = int(component_of[i]), int(component_of[j])
            if ci == cj:
                raise ContradictoryConstraints((i, j), members[ci].tolist())
            cannot_adj[ci].add(cj)
            cannot_adj[cj].add(ci)

    return CliqueIndex(n_points, component_of, members, cannot_adj,
                       must_neighbors, propagate_must)


def func_must(ci: CliqueIndex, x: int) -> np.ndarray:
    """Points that must share a cluster with x (always includes x).

    With propagation enabled this is x's whole clique; the primitive mode
    returns only x and its explicitly linked partners.
    """
    if ci.propagate_must:
        return ci.members[ci.component_of[x]]
    return np.array(sorted(ci.must_neighbors[x] | {x}), dtype=int)


def func_cannot(ci: CliqueIndex, x: int) -> np.ndarray:
    """Points that may not share a cluster with x: the union of all cliques
    cannot-adjacent to x's clique."""
    adj = ci.cannot_adj[ci.component_of[x]]
    if not adj:
        return np.empty(0, dtype=int)
    return np.concatenate([ci.members[c] for c in sorted(adj)])


def from_labels(labeled: dict) -> ConstraintSet:
    """Exhaustive conversion of partition-level side information.

    Every pair of labeled points becomes a constraint: must-link when the
    class ids agree, cannot-link otherwise, m*(m-1)/2 pairs in total.
    """
    pts = sorted(labeled)
    must, cannot = set(), set()
    for pos, i in enumerate(pts):
        for j in pts[pos + 1:]:
            if labeled[i] == labeled[j]:
                must.add((i, j))
            else:
                cannot.add((i, j))
    return ConstraintSet(must, cannot)


def corrupt_labels(labeled: dict, fraction: float, n_classes: int, seed=0) -> dict:
    """Replace a fraction of the labels with uniformly random *wrong* class ids.

    Exactly round(fraction * m) entries are chosen without replacement.
    Deterministic for a fixed seed.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    out = dict(labeled)
    m = len(out)
    n_corrupt = int(np.floor(fraction * m + 0.5))
    if n_corrupt == 0:
        return out
    if n_classes < 2:
        raise NoIncorrectLabelAvailable(
            "cannot draw an incorrect label when only one class exists")
    rng = np.random.default_rng(seed)
    pts = sorted(out)
    for pos in rng.choice(m, size=n_corrupt, replace=False):
        p = pts[int(pos)]
        wrong = [c for c in range(1, n_classes + 1) if c != out[p]]
        out[p] = int(wrong[rng.integers(len(wrong))])
    return out


def sample_side_info(labels, fraction: float, mode: str = "all_classes", seed=0) -> dict:
    """Sample ground-truth labels for a random subset of points.

    all_classes: a uniformly random fraction of all points.
    two_classes: pick uniformly among class pairs covering at least 30% of
    the data, then label a fraction of the points of those two classes.
    """
    labels = np.asarray(labels, dtype=int)
    n = labels.size
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    if mode == "all_classes":
        m = int(np.floor(fraction * n + 0.5))
        chosen = rng.choice(n, size=m, replace=False) if m else np.empty(0, dtype=int)
    elif mode == "two_classes":
        classes, counts = np.unique(labels, return_counts=True)
        size_of = dict(zip(classes.tolist(), counts.tolist()))
        qualifying = [(a, b)
                      for pos, a in enumerate(classes.tolist())
                      for b in classes.tolist()[pos + 1:]
                      if size_of[a] + size_of[b] >= 0.3 * n]
        if not qualifying:
            raise InfeasibleSideInfo(
                "no pair of classes covers at least 30% of the data")
        a, b = qualifying[int(rng.integers(len(qualifying)))]
        pool = np.flatnonzero((labels == a) | (labels == b))
        m = int(np.floor(fraction * pool.size + 0.5))
        chosen = rng.choice(pool, size=m, replace=False) if m else np.empty(0, dtype=int)
    else:
        raise ValueError(f"unknown side-information mode {mode!r}")
    return {int(i): int(labels[i]) for i in chosen}


def sample_pairs(labels, count: int, seed=0) -> ConstraintSet:
    """Draw `count` uniformly random point pairs and label them by ground truth.

    Pairs are sampled without replacement from all N*(N-1)/2 combinations;
    same-class pairs become must-links, the rest cannot-links.
    """
    labels = np.asarray(labels, dtype=int)
    n = labels.size
    total = n * (n - 1) // 2
    count = min(int(count), total)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=count, replace=False)
    must, cannot = set(), set()
    for flat in chosen:
        # decode the flat index into the (i, j) pair with i < j
        i = int((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * flat)) // 2)
        j = int(flat - i * (2 * n - i - 1) // 2 + i + 1)
        if labels[i] == labels[j]:
            must.add((i, j))
        else:
            cannot.add((i, j))
    return ConstraintSet(must, cannot)


def greedy_coloring(ci: CliqueIndex, K: int, seed=0):
    """Color cliques so that cannot-adjacent cliques differ, greedily.

    Cliques are visited in ascending smallest-member order. A clique without
    cannot-adjacency gets a uniformly random color; otherwise the smallest
    color unused among its already-colored cannot neighbors. When all K
    colors are blocked the least-blocked color is taken and counted as a
    conflict.

    Returns (partition, n_conflicts); n_conflicts == 0 means the coloring
    satisfies every constraint.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    rng = np.random.default_rng(seed)
    colors = np.zeros(ci.n_cliques, dtype=int)
    conflicts = 0
    for cid in range(ci.n_cliques):
        if not ci.cannot_adj[cid]:
            colors[cid] = int(rng.integers(1, K + 1))
            continue
        blocked = [int(colors[other]) for other in sorted(ci.cannot_adj[cid])
                   if colors[other] > 0]
        used = set(blocked)
        free = [c for c in range(1, K + 1) if c not in used]
        if free:
            colors[cid] = free[0]
        else:
            counts = np.bincount(blocked, minlength=K + 1)[1:]
            colors[cid] = int(np.argmin(counts)) + 1
            conflicts += 1
    return Partition(colors[ci.component_of], K), conflicts


def violations(g: Partition, cs: ConstraintSet):
    """Count broken constraints: must pairs split apart, cannot pairs joined."""
    a = g.assign
    must_v = sum(1 for i, j in cs.must if a[i] != a[j])
    cannot_v = sum(1 for i, j in cs.cannot if a[i] == a[j])
    return must_v, cannot_v


def read_constraint_file(path) -> ConstraintSet:
    """Parse a constraint file: `ML i j` or `CL i j` per line, 0-based indices,
    `#` starts a comment."""
    path = os.fspath(path)
    must, cannot = set(), set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("ML", "CL"):
                raise ParseError(f"{path}:{lineno}: expected 'ML i j' or 'CL i j', got {raw.strip()!r}")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: point indices must be integers") from None
            (must if parts[0] == "ML" else cannot).add((i, j))
    return ConstraintSet(must, cannot)


def write_constraint_file(path, cs: ConstraintSet) -> None:
    """Write constraints in the `ML i j` / `CL i j` format, sorted for determinism."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in sorted(cs.must):
            fh.write(f"ML {i} {j}\n")
        for i, j in sorted(cs.cannot):
            fh.write(f"CL {i} {j}\n")
