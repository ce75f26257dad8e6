"""Per-cluster binomial proportions and the cluster information measure.

``ones[i, j]`` counts the members of cluster ``i`` holding a 1 at gene ``j``;
``sizes[i]`` is the cluster size. Everything else (proportions, centroids,
information measures) is a closed form of those counts.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

MLE = "mle"
WILSON = "wilson"
ESTIMATORS = (MLE, WILSON)


class EmptyClusterError(ValueError):
    pass


def mle_proportion(s, n):
    """Sample proportion ``s / n``."""
    n = np.asarray(n)
    if np.any(n == 0):
        raise EmptyClusterError("maximum-likelihood proportion of an empty cluster")
    return np.asarray(s) / n


def wilson_proportion(s, n):
    """Shrunken proportion ``(s + 2) / (n + 4)``; never reaches 0 or 1."""
    return (np.asarray(s) + 2.0) / (np.asarray(n) + 4.0)


def proportions(s, n, estimator: str = MLE):
    if estimator == MLE:
        return mle_proportion(s, n)
    if estimator == WILSON:
        return wilson_proportion(s, n)
    raise ValueError(f"unknown estimator {estimator!r}")


def gene_entropy(p1):
    """Binary entropy in bits, with 0 log 0 = 0."""
    p1 = np.asarray(p1, dtype=float)
    p0 = 1.0 - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p1 > 0, p1 * np.log2(p1), 0.0) + np.where(p0 > 0, p0 * np.log2(p0), 0.0))
    return h if h.ndim else float(h)


class CountTable:
    """Cluster sizes and per-gene one-counts of a partitioned population."""

    def __init__(self, k: int, m: int):
        self.sizes = np.zeros(k, dtype=np.int64)
        self.ones = np.zeros((k, m), dtype=np.int64)
        # bumped on every mutation so derived matrices can be cached
        self.version = 0

    @classmethod
    def from_population(cls, pop: np.ndarray, labels: np.ndarray, k: int) -> "CountTable":
        pop = np.asarray(pop)
        labels = np.asarray(labels)
        table = cls(k, pop.shape[1])
        keep = labels >= 0
        np.add.at(table.sizes, labels[keep], 1)
        np.add.at(table.ones, labels[keep], pop[keep].astype(np.int64))
        return table

    @property
    def k(self) -> int:
        return self.ones.shape[0]

    @property
    def m(self) -> int:
        return self.ones.shape[1]

    @property
    def n(self) -> int:
        return int(self.sizes.sum())

    @property
    def gene_totals(self) -> np.ndarray:
        return self.ones.sum(axis=0)

    def add(self, i: int, g: np.ndarray) -> None:
        self.sizes[i] += 1
        self.ones[i] += g
        self.version += 1

    def remove(self, i: int, g: np.ndarray) -> None:
        if self.sizes[i] == 0:
            raise EmptyClusterError(f"cluster {i} is already empty")
        self.sizes[i] -= 1
        self.ones[i] -= g
        self.version += 1

    def copy(self) -> "CountTable":
        out = CountTable(self.k, self.m)
        out.sizes[:] = self.sizes
        out.ones[:] = self.ones
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, CountTable) and np.array_equal(self.sizes, other.sizes)
                and np.array_equal(self.ones, other.ones))


def leave_cluster_out_proportion(counts: CountTable, i: int, j=slice(None)):
    """P(x_j = 1 | member of any cluster other than ``i``)."""
    rest = counts.n - counts.sizes[i]
    if rest <= 0:
        raise EmptyClusterError("no individuals outside the cluster")
    return (counts.gene_totals[j] - counts.ones[i, j]) / rest


def information_measure(counts: CountTable, i: int, j=slice(None)):
    """Entropy drop of gene ``j`` (whole population vs. population without cluster ``i``)."""
    before = gene_entropy(counts.gene_totals[j] / counts.n)
    after = gene_entropy(leave_cluster_out_proportion(counts, i, j))
    return before - after


def information_matrix(sizes: np.ndarray, ones: np.ndarray) -> np.ndarray:
    """Matrix of information measures for all clusters and genes.

    With a single cluster nothing can be left out and every entry is 0.
    """
    k, m = ones.shape
    if k == 1:
        return np.zeros((1, m))
    n = sizes.sum()
    totals = ones.sum(axis=0)
    rest = (n - sizes)[:, None]
    if np.any(rest == 0):
        raise EmptyClusterError("a cluster holds the whole population")
    before = gene_entropy(totals / n)
    after = gene_entropy((totals[None, :] - ones) / rest)
    return before[None, :] - after


def rebuild_matrices(counts: CountTable, estimator: str = MLE) -> tuple[np.ndarray, np.ndarray]:
    """Proportion matrix and information matrix from scratch."""
    if np.any(counts.sizes == 0):
        raise EmptyClusterError("every cluster must be non-empty")
    return (proportions(counts.ones, counts.sizes[:, None], estimator),
            information_matrix(counts.sizes, counts.ones))


class ModelPair:
    """Immutable snapshot of a clustered model: counts plus cluster mean fitness.

    Proportions (either estimator) and the information matrix are computed on
    first use and cached.
    """

    def __init__(self, sizes: np.ndarray, ones: np.ndarray, mean_fitness: np.ndarray):
        self.sizes = np.array(sizes, dtype=np.int64)
        self.ones = np.array(ones, dtype=np.int64)
        self.mean_fitness = np.array(mean_fitness, dtype=float)
        for a in (self.sizes, self.ones, self.mean_fitness):
            a.flags.writeable = False
        self._cache: dict = {}

    @classmethod
    def from_counts(cls, counts: CountTable, mean_fitness: np.ndarray) -> "ModelPair":
        return cls(counts.sizes, counts.ones, mean_fitness)

    @property
    def k(self) -> int:
        return self.ones.shape[0]

    def proportions(self, estimator: str = MLE) -> np.ndarray:
        if estimator not in self._cache:
            self._cache[estimator] = proportions(self.ones, self.sizes[:, None], estimator)
        return self._cache[estimator]

    @property
    def information(self) -> np.ndarray:
        if "info" not in self._cache:
            self._cache["info"] = information_matrix(self.sizes, self.ones)
        return self._cache["info"]


def sample_genome(pv: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli draw per gene."""
    return (rng.random(len(pv)) < pv).astype(np.uint8)


def export_csv(matrix: np.ndarray, path, fmt: str = "%.6f") -> None:
    """Write a clusters-by-genes matrix as CSV (one row per cluster)."""
    np.savetxt(Path(path), np.atleast_2d(matrix), delimiter=",", fmt=fmt)
