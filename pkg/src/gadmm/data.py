"""Synthetic dataset generation, CSV ingestion, and shard partitioning.

The synthetic recipe (a repo convention, not a claim about any particular
benchmark): standard-normal features and a standard-normal ground-truth
model, linear targets with N(0, 0.01)-variance noise, logistic labels
drawn Bernoulli from the sigmoid of the clean score.

CSV files are numeric with the target in the last column; a header row is
auto-detected by a non-numeric first line.
"""

from __future__ import annotations

import csv as _csv
from dataclasses import dataclass

import numpy as np

from .objectives import LINEAR, LOGISTIC, LocalObjective

__all__ = ["Dataset", "gen_synthetic", "load_csv", "partition_even"]


@dataclass
class Dataset:
    features: np.ndarray  # (m, d)
    targets: np.ndarray  # (m,)
    task: str  # "linear" | "logistic"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.task not in (LINEAR, LOGISTIC):
            raise ValueError(f"unknown task {self.task!r}")
        if self.features.ndim != 2 or self.features.shape[0] != self.targets.shape[0]:
            raise ValueError("features and targets disagree on the sample count")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def standardized(self) -> "Dataset":
        """Z-scored copy (columns with zero spread are left centered)."""
        mu = self.features.mean(axis=0)
        sd = self.features.std(axis=0)
        sd[sd == 0.0] = 1.0
        return Dataset((self.features - mu) / sd, self.targets.copy(), self.task)


def gen_synthetic(task: str, m: int, d: int, seed: int) -> Dataset:
    """Random regression/classification data, reproducible per seed."""
    if m < 1 or d < 1:
        raise ValueError("m and d must be >= 1")
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((m, d))
    theta_true = rng.standard_normal(d)
    scores = features @ theta_true
    if task == LINEAR:
        targets = scores + rng.normal(0.0, 0.1, size=m)
    elif task == LOGISTIC:
        prob = 1.0 / (1.0 + np.exp(-scores))
        targets = (rng.random(m) < prob).astype(float)
    else:
        raise ValueError(f"unknown task {task!r}")
    return Dataset(features, targets, task)


def load_csv(path: str, task: str) -> Dataset:
    """Parse a numeric CSV whose last column is the target."""
    rows = []
    header_skipped = False
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(_csv.reader(fh), start=1):
            if not rec or all(not cell.strip() for cell in rec):
                continue
            try:
                rows.append([float(cell) for cell in rec])
            except ValueError:
                if lineno == 1 and not header_skipped:
                    header_skipped = True
                    continue
                raise ValueError(f"{path}:{lineno}: malformed numeric row") from None
            if len(rows) > 1 and len(rows[-1]) != len(rows[0]):
                raise ValueError(f"{path}:{lineno}: inconsistent column count")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need at least one feature column plus a target")
    features, targets = data[:, :-1], data[:, -1]
    if task == LOGISTIC and not np.all((targets == 0) | (targets == 1)):
        raise ValueError(f"{path}: logistic targets must be 0/1")
    return Dataset(features, targets, task)


def partition_even(ds: Dataset, n_workers: int) -> list[LocalObjective]:
    """Contiguous, order-preserving shards; remainders go to the first workers."""
    m = ds.n_samples
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    if n_workers > m:
        raise ValueError(f"cannot split {m} samples across {n_workers} workers")
    base, extra = divmod(m, n_workers)
    shards = []
    start = 0
    for w in range(n_workers):
        size = base + (1 if w < extra else 0)
        shards.append(
            LocalObjective(
                ds.task,
                ds.features[start : start + size],
                ds.targets[start : start + size],
            )
        )
        start += size
    return shards
