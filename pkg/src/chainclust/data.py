"""Dataset ingestion, preprocessing and synthetic benchmark generation."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyDataset, ParseError


@dataclass(frozen=True)
class Dataset:
    """A fixed matrix of points with optional ground-truth class labels.

    points : (N, n) float matrix, one row per data point; entries must be finite.
    labels : optional (N,) int vector of class ids 1..n_classes.
    feature_names : optional names for the n feature columns.
    name : identifier used in reports and config echoes.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    feature_names: list[str] | None = None
    name: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be two-dimensional")
        if pts.shape[0] < 2 or pts.shape[1] < 1:
            raise ValueError(f"need N >= 2 points and n >= 1 features, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or Inf entries")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=int)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must have one entry per point")
            if lab.min() < 1:
                raise ValueError("class ids must be >= 1")
            object.__setattr__(self, "labels", lab)
        if self.feature_names is not None and len(self.feature_names) != pts.shape[1]:
            raise ValueError("feature_names must have one entry per feature")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        """Number of ground-truth classes, 0 when the dataset is unlabeled."""
        return 0 if self.labels is None else int(self.labels.max())


def load_csv(path, label_column: str | None = None) -> Dataset:
    """Load a comma-separated file with a header row.

    All columns except the optional label column must be numeric ('.' decimal
    separator). Label values may be arbitrary strings; they are mapped to
    dense class ids 1..K in order of first appearance.
    """
    path = os.fspath(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) <= 1:
        raise EmptyDataset(f"{path}: no data rows")
    header = [c.strip() for c in rows[0]]
    if label_column is not None and label_column not in header:
        raise ParseError(f"{path}: label column {label_column!r} not found in header {header}")
    label_idx = header.index(label_column) if label_column is not None else None
    feature_idx = [i for i in range(len(header)) if i != label_idx]
    if not feature_idx:
        raise ParseError(f"{path}: no feature columns besides the label column")

    points = []
    raw_labels = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        vals = []
        for i in feature_idx:
            cell = row[i].strip()
            try:
                vals.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: column {header[i]!r}: not a number: {cell!r}"
                ) from None
        points.append(vals)
        if label_idx is not None:
            raw_labels.append(row[label_idx].strip())

    labels = None
    if label_idx is not None:
        first_seen: dict[str, int] = {}
        labels = np.array([first_seen.setdefault(v, len(first_seen) + 1) for v in raw_labels])
    name = os.path.splitext(os.path.basename(path))[0]
    return Dataset(np.array(points, dtype=float), labels,
                   [header[i] for i in feature_idx], name)


def write_csv(d: Dataset, path) -> None:
    """Write a dataset as CSV; labels go into a final `label` column."""
    header = list(d.feature_names or (f"f{i + 1}" for i in range(d.n_features)))
    if d.labels is not None:
        header.append("label")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(d.n_points):
            row = [repr(float(v)) for v in d.points[i]]
            if d.labels is not None:
                row.append(str(int(d.labels[i])))
            writer.writerow(row)


def zscore_normalize(d: Dataset) -> Dataset:
    """Center each feature and scale it to unit population standard deviation.

    Constant features are centered and left at zero.
    """
    mean = d.points.mean(axis=0)
    std = d.points.std(axis=0)
    # a bitwise-constant column can still have std ~ 1e-15 from the mean
    # subtraction; detect constancy exactly
    constant = (np.ptp(d.points, axis=0) == 0.0) | (std == 0.0)
    scaled = (d.points - mean) / np.where(constant, 1.0, std)
    scaled[:, constant] = 0.0
    return Dataset(scaled, d.labels, d.feature_names, d.name)


def _jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues in non-increasing order and the matching eigenvector
    columns, each with its largest-magnitude component made positive. Sweeps
    stop once the off-diagonal Frobenius norm drops below tol.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a ** 2) - np.sum(np.diag(a) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    eigvals = np.diag(a).copy()
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    v = v[:, order]
    for j in range(n):
        peak = np.argmax(np.abs(v[:, j]))
        if v[peak, j] < 0.0:
            v[:, j] = -v[:, j]
    return eigvals, v


def pca_reduce(d: Dataset, dims: int) -> Dataset:
    """Project onto the leading principal components of the covariance matrix.

    Points are mean-centered first; labels are carried through unchanged.
    """
    n = d.n_features
    if dims > n:
        raise DimensionError(f"cannot keep {dims} components of {n} features")
    if dims < 1:
        raise DimensionError("dims must be at least 1")
    centered = d.points - d.points.mean(axis=0)
    cov = centered.T @ centered / d.n_points
    cov = (cov + cov.T) / 2.0
    _, eigvecs = _jacobi_eigh(cov)
    projected = centered @ eigvecs[:, :dims]
    return Dataset(projected, d.labels, [f"pc{i + 1}" for i in range(dims)], d.name)


def generate_circles(n_per_circle: int = 60,
                     radii=(0.5, 7.0, 15.0),
                     noise_std: float = 0.3,
                     seed: int = 0) -> Dataset:
    """Concentric rings with uniformly random angles and Gaussian jitter.

    Each ring contributes n_per_circle points labeled by its 1-based index.
    Deterministic for a fixed seed.
    """
    if n_per_circle < 1:
        raise ValueError("n_per_circle must be at least 1")
    radii = [float(r) for r in radii]
    if not radii or any(r < 0 for r in radii):
        raise ValueError("radii must be non-empty and non-negative")
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    rng = np.random.default_rng(seed)
    blocks = []
    labels = []
    for ring, r in enumerate(radii, start=1):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n_per_circle)
        ring_pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        ring_pts += noise_std * rng.standard_normal(ring_pts.shape)
        blocks.append(ring_pts)
        labels.append(np.full(n_per_circle, ring))
    return Dataset(np.vstack(blocks), np.concatenate(labels), ["x", "y"], "circles")
