"""The incremental clustered EDA loop.

One offspring per iteration: sample it from a single cluster's probability
vector or from an interbred temporary vector, evaluate it, let it replace the
worst individual if it is not worse, then update clusters and counts with one
local k-means step. An old model snapshot competes with the live model for
producing offspring.
"""
from __future__ import annotations

import json
import logging
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import IO, Optional

import numpy as np

from . import combine
from .clustering import ClusterState, initial_clustering
from .model import MLE, WILSON, ModelPair, sample_genome
from .problems import ProblemInstance

log = logging.getLogger(__name__)

DEFAULT_MAX_EVALS = 100_000
SATURATION_HIGH = 0.95
SATURATION_LOW = 0.05

OLD = "old"
LIVE = "live"


class ConfigError(ValueError):
    pass


@dataclass
class EngineConfig:
    n0: int
    nw: int
    k: int
    p_c: float = 0.5
    p_old: float = 0.5
    p_w: float = 0.5
    max_evals: int = DEFAULT_MAX_EVALS
    seed: int = 0
    operator: str = combine.CG

    def validate(self) -> "EngineConfig":
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.nw > self.n0:
            raise ConfigError(f"working population ({self.nw}) larger than initial ({self.n0})")
        if self.nw == self.n0:
            warnings.warn("N0 == Nw: no truncation selection at initialization", stacklevel=2)
        if self.nw < self.k:
            raise ConfigError(f"working population ({self.nw}) smaller than k ({self.k})")
        for name in ("p_c", "p_old", "p_w"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name}={p} is not a probability")
        if self.operator not in combine.OPERATORS:
            raise ConfigError(f"unknown operator {self.operator!r}")
        if self.max_evals < self.n0:
            raise ConfigError("max_evals must cover the initial population")
        return self


@dataclass
class HypothesisSet:
    model: ModelPair
    performance: int = 0


@dataclass
class RunResult:
    problem: str
    seed: int
    evals_to_convergence: int
    converged: bool
    distinct_global_optima_found: int
    best_fitness: float
    first_optimum_evals: Optional[int]
    population: np.ndarray = field(repr=False)
    fitness: np.ndarray = field(repr=False)

    @property
    def success(self) -> bool:
        return self.distinct_global_optima_found > 0

    def to_dict(self, with_population: bool = True) -> dict:
        d = asdict(self)
        d["success"] = self.success
        if with_population:
            d["population"] = ["".join(map(str, g)) for g in self.population.tolist()]
            d["fitness"] = self.fitness.tolist()
        else:
            del d["population"], d["fitness"]
        return d

    def to_json(self, with_population: bool = True) -> str:
        return json.dumps(self.to_dict(with_population), sort_keys=True)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RunResult)
                and self.to_dict() == other.to_dict())


@dataclass
class Offspring:
    genome: np.ndarray
    hypothesis: str
    estimator: str
    interbred: bool
    parents: tuple[int, ...]
    from_a: Optional[np.ndarray] = None


class RunState:
    """Everything one run owns: population, clusters, hypotheses, counters and RNG."""

    def __init__(self, config: EngineConfig, problem: ProblemInstance,
                 rng: Optional[np.random.Generator] = None):
        self.config = config.validate()
        self.problem = problem
        self.rng = np.random.default_rng(config.seed) if rng is None else rng
        self.evals = 0
        self.iterations = 0
        self.live_performance = 0
        self.swaps = 0
        self.first_optimum_evals: Optional[int] = None
        self._live: Optional[ModelPair] = None
        self._live_key = (None, -1)
        self._convergence_cache = (None, -1, False)
        self._initialize()

    # -- initialization ---------------------------------------------------

    def _initialize(self) -> None:
        cfg, problem, rng = self.config, self.problem, self.rng
        pop = rng.integers(0, 2, size=(cfg.n0, problem.m), dtype=np.uint8)
        if problem.repairer is not None:
            pop = np.array([problem.repair(g, rng) for g in pop], dtype=np.uint8)
        fit = problem.evaluate_batch(pop)
        self.evals = cfg.n0
        if np.any(fit == problem.optimum_fitness):
            self.first_optimum_evals = int(np.argmax(fit == problem.optimum_fitness)) + 1
        best = np.argsort(-fit, kind="stable")[:cfg.nw]
        self.pop = np.ascontiguousarray(pop[best])
        self.fitness = fit[best].astype(float)
        self.clusters: ClusterState = initial_clustering(self.pop, cfg.k, rng)
        self.old = HypothesisSet(self.live_model(), 0)

    # -- models -------------------------------------------------------------

    def cluster_mean_fitness(self) -> np.ndarray:
        c = self.clusters
        active = c.labels >= 0
        sums = np.bincount(c.labels[active], weights=self.fitness[active], minlength=c.k)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(c.sizes > 0, sums / np.maximum(c.sizes, 1), 0.0)

    def live_model(self) -> ModelPair:
        counts = self.clusters.counts
        table, version = self._live_key
        if self._live is None or table is not counts or version != counts.version:
            self._live = ModelPair.from_counts(counts, self.cluster_mean_fitness())
            self._live_key = (counts, counts.version)
        return self._live

    @property
    def can_interbreed(self) -> bool:
        return self.config.k >= 2 and self.config.operator != combine.NONE

    # -- one iteration --------------------------------------------------------

    def breed_one(self) -> Offspring:
        """Draw one offspring (repaired if the problem needs it); no evaluation."""
        cfg, rng = self.config, self.rng
        use_old = rng.random() < cfg.p_old
        model = self.old.model if use_old else self.live_model()
        estimator = WILSON if rng.random() < cfg.p_w else MLE
        interbred = rng.random() < cfg.p_c and self.can_interbreed
        if interbred:
            g, a, b, v = combine.interbreed(model, estimator, rng, cfg.operator)
            parents, from_a = (a, b), v.from_a
        else:
            i = combine.fitness_proportional(model.mean_fitness, rng)
            g = sample_genome(model.proportions(estimator)[i], rng)
            parents, from_a = (i,), None
        g = self.problem.repair(g, rng)
        return Offspring(g, OLD if use_old else LIVE, estimator, interbred, parents, from_a)

    def select_replace_worst(self, g: np.ndarray, fitness: float) -> bool:
        worst = int(np.argmin(self.fitness))
        if fitness < self.fitness[worst]:
            return False
        self.clusters.remove(worst)
        self.fitness[worst] = fitness
        self.clusters.insert(worst, g)
        return True

    def update_hypotheses(self, accepted: bool, used: str) -> bool:
        """Credit the hypothesis that produced an accepted offspring; returns True on a swap."""
        if not accepted:
            return False
        if used == OLD:
            self.old.performance += 1
            return False
        self.live_performance += 1
        if self.live_performance > self.old.performance:
            self.old = HypothesisSet(self.live_model(), self.live_performance)
            self.live_performance = 0
            self.swaps += 1
            return True
        return False

    def check_convergence(self) -> bool:
        c = self.clusters.counts
        cached_table, version, value = self._convergence_cache
        if cached_table is not c or version != c.version:
            pi = c.ones / c.sizes[:, None]
            value = bool(np.all((pi > SATURATION_HIGH) | (pi < SATURATION_LOW)))
            self._convergence_cache = (c, c.version, value)
        return value

    def step(self) -> dict:
        child = self.breed_one()
        f = self.problem.evaluate(child.genome)
        self.evals += 1
        self.iterations += 1
        if self.first_optimum_evals is None and f == self.problem.optimum_fitness:
            self.first_optimum_evals = self.evals
        accepted = self.select_replace_worst(child.genome, f)
        swapped = self.update_hypotheses(accepted, child.hypothesis)
        return {"child": child, "fitness": f, "accepted": accepted, "swapped": swapped}

    # -- reporting ------------------------------------------------------------

    def optimal_genomes(self) -> np.ndarray:
        hit = self.fitness == self.problem.optimum_fitness
        if self.problem.repairer is not None:
            hit &= self.problem.feasible(self.pop)
        return np.unique(self.pop[hit], axis=0)

    def result(self, converged: bool) -> RunResult:
        return RunResult(
            problem=self.problem.name,
            seed=self.config.seed,
            evals_to_convergence=self.evals,
            converged=converged,
            distinct_global_optima_found=len(self.optimal_genomes()),
            best_fitness=float(self.fitness.max()),
            first_optimum_evals=self.first_optimum_evals,
            population=self.pop.copy(),
            fitness=self.fitness.copy(),
        )


def _trace_record(state: RunState, out: dict, with_labels: bool) -> dict:
    child: Offspring = out["child"]
    rec = {
        "evals": state.evals,
        "hypothesis": child.hypothesis,
        "estimator": child.estimator,
        "interbred": child.interbred,
        "parents": list(child.parents),
        "fitness": out["fitness"],
        "accepted": out["accepted"],
        "swapped": out["swapped"],
        "sizes": state.clusters.sizes.tolist(),
    }
    if child.from_a is not None:
        rec["provenance"] = "".join("A" if x else "B" for x in child.from_a)
    if with_labels:
        rec["labels"] = state.clusters.labels.tolist()
    return rec


def initialize(config: EngineConfig, problem: ProblemInstance,
               rng: Optional[np.random.Generator] = None) -> RunState:
    return RunState(config, problem, rng)


def run(config: EngineConfig, problem: ProblemInstance, trace: Optional[IO[str]] = None,
        trace_labels: bool = False) -> RunResult:
    """Run until every live MLE proportion is saturated or the budget is spent.

    ``trace`` receives one JSON line per iteration.
    """
    t0 = time.perf_counter()
    state = RunState(config, problem)
    converged = state.check_convergence()
    while not converged and state.evals < config.max_evals:
        out = state.step()
        if trace is not None:
            trace.write(json.dumps(_trace_record(state, out, trace_labels)) + "\n")
        converged = state.check_convergence()
    result = state.result(converged)
    log.debug("%s seed=%d evals=%d optima=%d converged=%s (%.1fs)", problem.name, config.seed,
              result.evals_to_convergence, result.distinct_global_optima_found, converged,
              time.perf_counter() - t0)
    return result
