"""
Combining building blocks on a small trap
=========================================

Concatenated trap-5 with three blocks: each block pulls toward all zeros
unless all five of its genes are ones. The clusters tend to specialise on
one block each, and the question is whether recombination between cluster
models can assemble the three blocks.

Run with ``python demos/01_trap_building_blocks.py``.
"""
import io
import json
import warnings

import numpy as np

from phipbil import EngineConfig, make_problem, run

warnings.simplefilter("ignore")  # N0 == Nw on purpose

problem = make_problem("trapfive", 15)
blocks = np.arange(15).reshape(3, 5)

# %%
# One run per operator from the same seed, hence the same initial population.
# The trace keeps every iteration, including cluster labels. Not every seed
# ends well for cg: when a two-block pattern takes over before the third
# block is merged, the clusters saturate without the optimum.

for operator in ("cg", "pv-uniform"):
    buf = io.StringIO()
    cfg = EngineConfig(n0=100, nw=100, k=4, seed=0, operator=operator, max_evals=20_000)
    result = run(cfg, problem, trace=buf)
    trace = [json.loads(line) for line in buf.getvalue().splitlines()]
    swaps = sum(rec["swapped"] for rec in trace)
    print(f"{operator:>10}: converged after {result.evals_to_convergence} evaluations, "
          f"first optimum at {result.first_optimum_evals}, {swaps} hypothesis swaps")

# %%
# How many individuals hold 0, 1, 2 or 3 complete blocks? The trace does not
# store genomes, so step through the cg run by hand.

from phipbil.engine import RunState

state = RunState(EngineConfig(100, 100, 4, seed=0, operator="cg", max_evals=20_000), problem)
while not state.check_convergence() and state.evals < 20_000:
    if state.iterations % 250 == 0:
        full = state.pop[:, blocks].all(axis=2).sum(axis=1)
        hist = np.bincount(full, minlength=4)
        print(f"evals {state.evals:5d}  individuals with 0/1/2/3 blocks: {hist.tolist()}  "
              f"cluster sizes {state.clusters.sizes.tolist()}")
    state.step()

# %%
# Which cluster ends up holding the optimum?

opt = state.pop.all(axis=1)
print("clusters of optimal individuals:", np.unique(state.clusters.labels[opt]).tolist())
