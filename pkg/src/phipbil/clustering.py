"""Fixed-k clustering of the working population, kept current by single k-means steps.

Centroids are per-gene cluster means, i.e. ``ones / sizes`` of the cluster's
:class:`~phipbil.model.CountTable`, so they never drift from the membership.
Squared Euclidean distances are computed from integer counts and divided
once, which makes exact ties compare equal.
"""
from __future__ import annotations

import numpy as np

from .model import CountTable

MAX_LLOYD_ITERATIONS = 100


def squared_distances(x: np.ndarray, sizes: np.ndarray, ones: np.ndarray) -> np.ndarray:
    """Squared distances from rows of ``x`` (n, m) to the k centroids, shape (n, k).

    Empty clusters are infinitely far away.
    """
    x = np.atleast_2d(x).astype(float)
    n = sizes.astype(float)
    s = ones.astype(float)
    # n^2 * d = n^2 |x|^2 - 2 n x.s + |s|^2, all integer-valued
    scaled = (n * n)[None, :] * x.sum(axis=1)[:, None] - 2.0 * n[None, :] * (x @ s.T) \
        + (s * s).sum(axis=1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        d = scaled / (n * n)[None, :]
    d[:, sizes == 0] = np.inf
    return d


class ClusterState:
    """Cluster labels for a fixed set of population slots plus their counts.

    ``genomes`` is shared with the owner of the population; a slot whose
    label is -1 is vacant and not counted.
    """

    def __init__(self, genomes: np.ndarray, labels: np.ndarray, k: int):
        self.genomes = genomes
        self.labels = np.asarray(labels, dtype=np.int64)
        self.k = k
        self.counts = CountTable.from_population(genomes, self.labels, k)

    @property
    def sizes(self) -> np.ndarray:
        return self.counts.sizes

    @property
    def centroids(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.counts.ones / self.counts.sizes[:, None]

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)

    def nearest(self, g: np.ndarray) -> int:
        return int(np.argmin(squared_distances(g, self.counts.sizes, self.counts.ones)[0]))

    def _move(self, slot: int, dest: int) -> None:
        g = self.genomes[slot]
        self.counts.remove(self.labels[slot], g)
        self.counts.add(dest, g)
        self.labels[slot] = dest

    def repair_empty(self) -> None:
        """Refill each empty cluster with the worst-fitting member of the largest cluster."""
        for i in np.flatnonzero(self.counts.sizes == 0):
            donor = int(np.argmax(self.counts.sizes))
            if self.counts.sizes[donor] < 2:
                return
            slots = self.members(donor)
            d = squared_distances(self.genomes[slots], self.counts.sizes, self.counts.ones)[:, donor]
            self._move(int(slots[np.argmax(d)]), int(i))

    def insert(self, slot: int, g: np.ndarray) -> int:
        """Place ``g`` into vacant ``slot`` and run one local k-means step.

        The newcomer joins its nearest centroid (or an empty cluster, if any);
        then every member of that cluster is reassigned to its nearest centroid
        once, using the centroids as they stand after the insertion.
        """
        if self.labels[slot] != -1:
            raise ValueError(f"slot {slot} is occupied")
        self.genomes[slot] = g
        empty = np.flatnonzero(self.counts.sizes == 0)
        target = int(empty[0]) if empty.size else self.nearest(g)
        self.counts.add(target, self.genomes[slot])
        self.labels[slot] = target

        slots = self.members(target)
        if self.k > 1 and slots.size > 1:
            d = squared_distances(self.genomes[slots], self.counts.sizes, self.counts.ones)
            best = np.argmin(d, axis=1)
            for s, b in zip(slots[best != target], best[best != target]):
                self._move(int(s), int(b))
            self.repair_empty()
        return int(self.labels[slot])

    def remove(self, slot: int) -> int:
        """Vacate ``slot``; returns the label it had."""
        label = int(self.labels[slot])
        if label < 0:
            raise ValueError(f"slot {slot} is not assigned to any cluster")
        self.counts.remove(label, self.genomes[slot])
        self.labels[slot] = -1
        self.repair_empty()
        return label

    def check(self, atol: float = 1e-9) -> None:
        """Assert counts and centroids agree with the raw membership."""
        fresh = CountTable.from_population(self.genomes, self.labels, self.k)
        assert fresh == self.counts, "count table out of sync with membership"
        active = self.labels >= 0
        for i in range(self.k):
            rows = self.genomes[self.labels == i]
            if len(rows):
                assert np.allclose(rows.mean(axis=0), self.centroids[i], atol=atol, rtol=0)
        assert self.counts.n == int(active.sum())


def nearest_centroid(g: np.ndarray, state: ClusterState) -> int:
    return state.nearest(g)


def insert_individual(state: ClusterState, slot: int, g: np.ndarray) -> int:
    return state.insert(slot, g)


def remove_individual(state: ClusterState, slot: int) -> int:
    return state.remove(slot)


def lloyd(pop: np.ndarray, labels: np.ndarray, k: int,
          max_iterations: int = MAX_LLOYD_ITERATIONS) -> np.ndarray:
    """Lloyd iterations from an initial labelling until assignments stop changing."""
    for _ in range(max_iterations):
        state = ClusterState(pop, labels, k)
        state.repair_empty()
        new = np.argmin(squared_distances(pop, state.sizes, state.counts.ones), axis=1)
        if np.array_equal(new, state.labels):
            return new
        labels = new
    return labels


def initial_clustering(pop: np.ndarray, k: int, rng: np.random.Generator) -> ClusterState:
    """Full k-means on ``pop``, seeded with ``k`` distinct individuals drawn uniformly."""
    n = len(pop)
    if n < k:
        raise ValueError(f"cannot form {k} clusters from {n} individuals")
    seeds = rng.choice(n, size=k, replace=False)
    seed_sizes = np.ones(k, dtype=np.int64)
    labels = np.argmin(squared_distances(pop, seed_sizes, pop[seeds].astype(np.int64)), axis=1)
    labels = lloyd(pop, labels, k)
    state = ClusterState(pop, labels, k)
    state.repair_empty()
    return state
