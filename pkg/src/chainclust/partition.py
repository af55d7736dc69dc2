"""Cluster assignments shared by the constraint, solver and evaluation code."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Partition:
    """Assignment of each point to one of K clusters.

    assign holds one cluster id per point, ids run from 1 to K. Empty
    clusters are permitted.
    """

    assign: np.ndarray
    K: int

    def __post_init__(self):
        arr = np.asarray(self.assign, dtype=int)
        if arr.ndim != 1:
            raise ValueError("assign must be a one-dimensional vector")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if arr.size and (arr.min() < 1 or arr.max() > self.K):
            raise ValueError(f"cluster ids must lie in 1..{self.K}")
        self.assign = arr

    @property
    def n_points(self) -> int:
        return self.assign.size

    def copy(self) -> "Partition":
        return Partition(self.assign.copy(), self.K)
