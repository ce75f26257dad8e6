"""Clustered linkage-learning EDA with concept-guided combination of cluster models."""
from .combine import CG, NONE, PV_UNIFORM, cg_combine, interbreed, pv_uniform_crossover
from .engine import EngineConfig, RunResult, RunState, initialize, run
from .harness import (
    BatchStats,
    ExperimentSpec,
    compare_to_reference,
    parameter_sweep,
    reference_row,
    run_batch,
    validate_oracles,
)
from .problems import PROBLEM_NAMES, ProblemInstance, make_problem

__version__ = "0.1.0"

__all__ = [
    "CG", "NONE", "PV_UNIFORM", "cg_combine", "interbreed", "pv_uniform_crossover",
    "EngineConfig", "RunResult", "RunState", "initialize", "run",
    "BatchStats", "ExperimentSpec", "compare_to_reference", "parameter_sweep", "reference_row",
    "run_batch", "validate_oracles",
    "PROBLEM_NAMES", "ProblemInstance", "make_problem",
]
