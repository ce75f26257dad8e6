"""
Several optima at once: bisecting a ring of caterpillars
========================================================

Four caterpillar groups of seven nodes sit on a ring. Any balanced cut that
separates two adjacent pairs of groups cuts exactly two ring edges, so there
are four optimal genomes. Clustering lets the population hold all of them.

Run with ``python demos/02_graph_bisection.py``.
"""
from phipbil import ExperimentSpec, compare_to_reference, make_problem, reference_row, run_batch
from phipbil.harness import config_from_reference
from phipbil.problems import enumerate_global_optima

problem = make_problem("Pcatring28")
print(f"{problem.name}: {problem.m} nodes")

# %%
# Brute force over all balanced strings confirms the peak count.

edges = len(problem.meta["graph"].edges)
optima = enumerate_global_optima(problem)
# fitness counts the edges left uncut
print(f"enumerated optima: {len(optima)}, each cutting {edges - problem.evaluate(optima[0]):.0f} edges")
for g in optima:
    print("  ", "".join(map(str, g)))

# %%
# Ten runs with the published settings for this instance, then a check
# against the published row.

row = reference_row("table3/phi-pbil/Pcatring28")
spec = ExperimentSpec("Pcatring28", None, config_from_reference(row), replications=10)
stats = run_batch(spec)
print(f"mean optima {stats.optima_mean:.1f} (sd {stats.optima_sd:.2f}), "
      f"mean evaluations {stats.evals_mean:.0f}")
for line in compare_to_reference(stats, row).lines():
    print(line)
