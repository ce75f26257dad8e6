"""Interbreeding between two cluster models.

Two ways of building a temporary probability vector from parents A and B:
``cg_combine`` takes each gene from the parent whose removal lowers that
gene's population entropy the most; ``pv_uniform_crossover`` flips a fair
coin per gene.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import ModelPair, sample_genome

CG = "cg"
PV_UNIFORM = "pv-uniform"
NONE = "none"
OPERATORS = (CG, PV_UNIFORM, NONE)


class TemporaryPV(NamedTuple):
    values: np.ndarray
    from_a: np.ndarray  # bool per gene: True where the entry came from parent A


def fitness_proportional(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to ``weights`` (uniform if all zero)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("selection weights must be non-negative")
    total = w.sum()
    if total <= 0:
        return int(rng.integers(len(w)))
    i = int(np.searchsorted(np.cumsum(w), rng.random() * total, side="right"))
    # rounding can push the draw past the last cumulative sum
    return i if i < len(w) else int(np.flatnonzero(w)[-1])


def select_parent_clusters(mean_fitness: np.ndarray, rng: np.random.Generator,
                           distinct: bool = True) -> tuple[int, int]:
    k = len(mean_fitness)
    if k < 2:
        raise ValueError("interbreeding needs at least two clusters")
    w = np.asarray(mean_fitness, dtype=float)
    a = fitness_proportional(w, rng)
    if not distinct:
        return a, fitness_proportional(w, rng)
    rest = np.delete(np.arange(k), a)
    b = int(rest[fitness_proportional(w[rest], rng)])
    return a, b


def cg_combine(pi: np.ndarray, w: np.ndarray, a: int, b: int) -> TemporaryPV:
    from_a = w[a] > w[b]
    return TemporaryPV(np.where(from_a, pi[a], pi[b]), from_a)


def pv_uniform_crossover(pi: np.ndarray, a: int, b: int, rng: np.random.Generator) -> TemporaryPV:
    from_a = rng.random(pi.shape[1]) < 0.5
    return TemporaryPV(np.where(from_a, pi[a], pi[b]), from_a)


def interbreed(model: ModelPair, estimator: str, rng: np.random.Generator,
               operator: str = CG) -> tuple[np.ndarray, int, int, TemporaryPV]:
    """Offspring of two fitness-proportionally chosen clusters of ``model``.

    Returns the genome, the parent labels and the temporary PV it was drawn from.
    """
    a, b = select_parent_clusters(model.mean_fitness, rng)
    pi = model.proportions(estimator)
    if operator == CG:
        v = cg_combine(pi, model.information, a, b)
    elif operator == PV_UNIFORM:
        v = pv_uniform_crossover(pi, a, b, rng)
    else:
        raise ValueError(f"unknown interbreeding operator {operator!r}")
    return sample_genome(v.values, rng), a, b, v
