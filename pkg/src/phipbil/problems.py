"""Benchmark problems: twomax, trap-5 (plain and overlapping), HIFF and graph bisection.

All fitness functions accept either a single genome of shape ``(m,)`` or a
batch of shape ``(n, m)`` and reduce over the last axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np


class ProblemConfigError(ValueError):
    """Raised when a problem instance cannot be built with the given sizes."""


# ---------------------------------------------------------------------------
# fitness functions
# ---------------------------------------------------------------------------

def twomax_fitness(g: np.ndarray) -> np.ndarray | float:
    g = np.asarray(g)
    n = g.shape[-1]
    return np.abs(n / 2 - g.sum(axis=-1))


def trap5(u):
    u = np.asarray(u)
    return np.where(u == 5, 5, 4 - u)


def trap5_fitness(g: np.ndarray) -> np.ndarray | float:
    g = np.asarray(g)
    m = g.shape[-1]
    if m % 5:
        raise ProblemConfigError(f"trap-5 needs a length divisible by 5, got {m}")
    u = g.reshape(g.shape[:-1] + (m // 5, 5)).sum(axis=-1)
    return trap5(u).sum(axis=-1)


def overlapping_blocks(block_count: int) -> np.ndarray:
    """Gene indices of the circular overlapping trap-5 blocks, shape (block_count, 5).

    Block ``b`` covers genes ``3b .. 3b+4`` modulo ``m = 3 * block_count``, so
    neighbouring blocks share two genes on each side.
    """
    m = 3 * block_count
    return (3 * np.arange(block_count)[:, None] + np.arange(5)[None, :]) % m


def overlapping_trap5_fitness(g: np.ndarray, block_count: int) -> np.ndarray | float:
    g = np.asarray(g)
    m = g.shape[-1]
    if m != 3 * block_count:
        raise ProblemConfigError(
            f"overlapping trap-5 with {block_count} blocks needs m={3 * block_count}, got {m}")
    u = g[..., overlapping_blocks(block_count)].sum(axis=-1)
    return trap5(u).sum(axis=-1)


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def hiff_fitness(g: np.ndarray, shuffle: Optional[np.ndarray] = None) -> np.ndarray | float:
    """Hierarchical if-and-only-if.

    If ``shuffle`` is given, gene ``j`` is placed at position ``shuffle[j]``
    before the hierarchy is evaluated.
    """
    g = np.asarray(g)
    m = g.shape[-1]
    if not _is_power_of_two(m):
        raise ProblemConfigError(f"HIFF needs a power-of-two length, got {m}")
    if shuffle is not None:
        placed = np.empty_like(g)
        placed[..., np.asarray(shuffle)] = g
        g = placed
    # a block of `size` genes is uniform iff its sum is 0 or size
    ones = np.cumsum(g, axis=-1, dtype=np.int64)
    ones = np.concatenate([np.zeros(g.shape[:-1] + (1,), dtype=np.int64), ones], axis=-1)
    total = np.full(g.shape[:-1], m, dtype=np.int64)
    size = 2
    while size <= m:
        sums = np.diff(ones[..., ::size], axis=-1)
        total = total + size * ((sums == 0) | (sums == size)).sum(axis=-1)
        size *= 2
    return total if total.ndim else int(total)


def hiff_optimum(m: int) -> int:
    p = int(math.log2(m))
    return (p + 1) * 2 ** p


# ---------------------------------------------------------------------------
# graph bisection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphInstance:
    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.node_count % 2:
            raise ProblemConfigError(f"bisection needs an even node count, got {self.node_count}")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ProblemConfigError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ProblemConfigError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ProblemConfigError(f"duplicate edge {key}")
            seen.add(key)
        if not self.is_connected():
            raise ProblemConfigError("graph is not connected")

    @property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def is_connected(self) -> bool:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.node_count

    def to_text(self) -> str:
        lines = [f"nodes {self.node_count}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GraphInstance":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or rows[0][0] != "nodes":
            raise ValueError("edge list must start with a 'nodes N' header")
        n = int(rows[0][1])
        return cls(n, tuple((int(u), int(v)) for u, v in rows[1:]))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "GraphInstance":
        return cls.from_text(Path(path).read_text())


def make_grid_graph(rows: int, cols: Optional[int] = None) -> GraphInstance:
    """4-neighbour lattice with ``rows x cols`` nodes (square when ``cols`` is omitted).

    Node ``(r, c)`` has index ``r * cols + c``.
    """
    cols = rows if cols is None else cols
    if rows < 1 or cols < 2:
        raise ProblemConfigError("grid needs at least 1 row and 2 columns")
    if (rows * cols) % 2:
        raise ProblemConfigError(f"grid {rows}x{cols} has an odd node count")
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return GraphInstance(rows * cols, tuple(edges))


def make_caterpillar_graph(group_count: int, group_size: int, ring: bool = False) -> GraphInstance:
    """Groups of one spine node plus ``group_size - 1`` leaves; spines form a path or a cycle.

    Group ``q`` occupies nodes ``q*group_size .. (q+1)*group_size - 1`` with its
    spine node first.
    """
    if group_count < 2 or group_size < 1:
        raise ProblemConfigError("caterpillar needs group_count >= 2 and group_size >= 1")
    if ring and group_count < 3:
        raise ProblemConfigError("a ring of spines needs at least 3 groups")
    if (group_count * group_size) % 2:
        raise ProblemConfigError("caterpillar node count must be even")
    edges = []
    for q in range(group_count):
        spine = q * group_size
        edges += [(spine, spine + leaf) for leaf in range(1, group_size)]
        if q + 1 < group_count:
            edges.append((spine, spine + group_size))
    if ring:
        edges.append(((group_count - 1) * group_size, 0))
    return GraphInstance(group_count * group_size, tuple(edges))


def is_balanced(g: np.ndarray) -> np.ndarray | bool:
    g = np.asarray(g)
    return 2 * g.sum(axis=-1) == g.shape[-1]


def bisection_fitness(g: np.ndarray, graph: GraphInstance) -> np.ndarray | float:
    g = np.asarray(g)
    if not np.all(is_balanced(g)):
        raise ValueError("bisection fitness is only defined for balanced genomes; repair first")
    e = graph.edge_array
    cut = (g[..., e[:, 0]] != g[..., e[:, 1]]).sum(axis=-1)
    return graph.node_count - cut


def repair_bisection(g: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Flip uniformly chosen majority-value genes until the genome is balanced.

    Each flip turns a majority gene into a minority one, so the sequential
    procedure picks ``excess`` distinct genes among the original majority,
    uniformly without replacement; that is sampled in one draw here.
    """
    g = np.asarray(g)
    m = g.shape[-1]
    ones = int(g.sum())
    excess = abs(2 * ones - m) // 2
    if excess == 0:
        return g
    majority = 1 if 2 * ones > m else 0
    idx = np.flatnonzero(g == majority)
    out = g.copy()
    out[rng.choice(idx, size=excess, replace=False)] = 1 - majority
    return out


def bisection_min_cut(graph: GraphInstance) -> int:
    """Minimum balanced cut by exhaustive search (small graphs only)."""
    best = None
    for genome in _balanced_genomes(graph.node_count):
        f = bisection_fitness(genome, graph)
        m = int(f.max())
        best = m if best is None else max(best, m)
    return graph.node_count - best


# ---------------------------------------------------------------------------
# problem instances and registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemInstance:
    name: str
    m: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    optimum_fitness: float
    known_peak_count: int
    repairer: Optional[Callable[[np.ndarray, np.random.Generator], np.ndarray]] = None
    feasible: Callable[[np.ndarray], np.ndarray] = field(default=lambda g: np.ones(np.shape(g)[:-1], dtype=bool))
    meta: dict = field(default_factory=dict, compare=False)

    def evaluate(self, g: np.ndarray) -> float:
        return float(self.evaluator(g))

    def evaluate_batch(self, pop: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(pop), dtype=float)

    def repair(self, g: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return g if self.repairer is None else self.repairer(g, rng)

    def is_optimal(self, g: np.ndarray) -> bool:
        return bool(self.feasible(g)) and self.evaluate(g) == self.optimum_fitness


def twomax_problem(m: int) -> ProblemInstance:
    if m % 2:
        raise ProblemConfigError("twomax needs an even length")
    return ProblemInstance("twomax", m, twomax_fitness, m / 2, 2)


def trapfive_problem(m: int) -> ProblemInstance:
    if m % 5:
        raise ProblemConfigError(f"trap-5 needs a length divisible by 5, got {m}")
    return ProblemInstance("trapfive", m, trap5_fitness, float(m), 1)


def overfive_problem(m: int) -> ProblemInstance:
    if m % 3 or m < 6:
        raise ProblemConfigError(f"overlapping trap-5 needs m = 3 * blocks (>= 6), got {m}")
    blocks = m // 3
    return ProblemInstance(
        "overfive", m, lambda g: overlapping_trap5_fitness(g, blocks), 5.0 * blocks, 1,
        meta={"block_count": blocks})


def hiff_problem(m: int, shuffle: Optional[np.ndarray] = None) -> ProblemInstance:
    if not _is_power_of_two(m):
        raise ProblemConfigError(f"HIFF needs a power-of-two length, got {m}")
    if shuffle is not None:
        shuffle = np.asarray(shuffle)
        if sorted(shuffle.tolist()) != list(range(m)):
            raise ProblemConfigError("shuffle must be a permutation of the gene indices")
    name = "hiff" if shuffle is None else "shuff-hiff"
    meta = {} if shuffle is None else {"permutation": shuffle.tolist()}
    return ProblemInstance(name, m, lambda g: hiff_fitness(g, shuffle), float(hiff_optimum(m)), 2,
                           meta=meta)


def bisection_problem(name: str, graph: GraphInstance, min_cut: int, peaks: int) -> ProblemInstance:
    return ProblemInstance(
        name, graph.node_count, lambda g: bisection_fitness(g, graph),
        float(graph.node_count - min_cut), peaks,
        repairer=repair_bisection, feasible=is_balanced, meta={"graph": graph})


# rows x 4*rows lattices have a single minimum balanced cut of ``rows`` edges
_GRIDS = {"Pgrid16": 2, "Pgrid36": 3, "Pgrid64": 4}
# (group_count, group_size)
_CATS = {"Pcat28": (4, 7), "Pcat42": (6, 7), "Pcat56": (8, 7)}
_CATRINGS = {"Pcatring28": (4, 7), "Pcatring42": (6, 7), "Pcatring56": (4, 14), "Pcatring84": (6, 14)}

PROBLEM_NAMES = ("twomax", "trapfive", "overfive", "hiff", "shuff-hiff",
                 *_GRIDS, *_CATS, *_CATRINGS)


def graph_problem(name: str, group_size: Optional[int] = None) -> ProblemInstance:
    """Named bisection instance.

    ``group_size`` overrides the caterpillar group size of ``Pcatring*``
    instances; the node count is kept, so the number of groups changes.
    """
    if name in _GRIDS:
        r = _GRIDS[name]
        return bisection_problem(name, make_grid_graph(r, 4 * r), min_cut=r, peaks=2)
    if name in _CATS:
        q, s = _CATS[name]
        return bisection_problem(name, make_caterpillar_graph(q, s, ring=False), min_cut=1, peaks=2)
    if name in _CATRINGS:
        q, s = _CATRINGS[name]
        if group_size is not None:
            n = q * s
            if n % group_size:
                raise ProblemConfigError(f"{name}: {n} nodes do not split into groups of {group_size}")
            q, s = n // group_size, group_size
        if q % 2:
            raise ProblemConfigError(f"{name}: an odd number of ring groups has no clean cut")
        # a ring cut must sever two spine edges; q/2 placements, two labelings each
        return bisection_problem(name, make_caterpillar_graph(q, s, ring=True), min_cut=2, peaks=q)
    raise KeyError(f"unknown bisection instance {name!r}")


def make_problem(name: str, size: Optional[int] = None,
                 rng: Optional[np.random.Generator] = None) -> ProblemInstance:
    """Build a problem by registry name.

    ``shuff-hiff`` draws its gene permutation from ``rng``.
    """
    if name in _GRIDS or name in _CATS or name in _CATRINGS:
        return graph_problem(name)
    if size is None:
        raise ProblemConfigError(f"problem {name!r} needs a size")
    if name == "twomax":
        return twomax_problem(size)
    if name == "trapfive":
        return trapfive_problem(size)
    if name == "overfive":
        return overfive_problem(size)
    if name == "hiff":
        return hiff_problem(size)
    if name == "shuff-hiff":
        if rng is None:
            raise ProblemConfigError("shuffled HIFF needs an rng for its permutation")
        return hiff_problem(size, rng.permutation(size))
    raise KeyError(f"unknown problem {name!r}")


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

MAX_ENUMERATION_LENGTH = 28
_CHUNK = 1 << 18


def _int_chunks(m: int):
    total = 1 << m
    for start in range(0, total, _CHUNK):
        yield np.arange(start, min(start + _CHUNK, total), dtype=np.int64)


def _to_bits(ints: np.ndarray, m: int) -> np.ndarray:
    return ((ints[:, None] >> np.arange(m, dtype=np.int64)) & 1).astype(np.uint8)


def _balanced_genomes(m: int):
    for ints in _int_chunks(m):
        ints = ints[np.bitwise_count(ints) == m // 2]
        if ints.size:
            yield _to_bits(ints, m)


def all_genomes(m: int):
    """Yield every genome of length ``m`` in chunks (gene ``j`` is bit ``j``)."""
    for ints in _int_chunks(m):
        yield _to_bits(ints, m)


def enumerate_global_optima(instance: ProblemInstance) -> np.ndarray:
    """Exact set of feasible genomes attaining the maximum fitness, one per row.

    Rows are ordered by their integer encoding. Refuses instances longer than
    ``MAX_ENUMERATION_LENGTH`` genes.
    """
    m = instance.m
    if m > MAX_ENUMERATION_LENGTH:
        raise ValueError(f"exhaustive enumeration refused for m={m} > {MAX_ENUMERATION_LENGTH}")
    chunks = _balanced_genomes(m) if instance.repairer is not None else all_genomes(m)
    best = -np.inf
    found: list[np.ndarray] = []
    for bits in chunks:
        f = instance.evaluate_batch(bits)
        top = f.max()
        if top > best:
            best, found = top, [bits[f == top]]
        elif top == best:
            found.append(bits[f == top])
    return np.concatenate(found)


def count_trap5_local_optima(m: int) -> int:
    """Number of non-global local optima of concatenated trap-5 of length ``m``."""
    if m % 5:
        raise ProblemConfigError(f"trap-5 needs a length divisible by 5, got {m}")
    return 2 ** (m // 5) - 1


def enumerate_trap5_local_optima(m: int) -> int:
    """Brute-force count of strict single-flip local maxima that are not global."""
    if m > 20:
        raise ValueError("brute-force local optima count limited to m <= 20")
    bits = np.concatenate(list(all_genomes(m)))
    f = trap5_fitness(bits)
    is_peak = np.ones(len(bits), dtype=bool)
    ints = np.arange(len(bits))
    for j in range(m):
        is_peak &= f > f[ints ^ (1 << j)]
    return int(np.sum(is_peak & (f < m)))
