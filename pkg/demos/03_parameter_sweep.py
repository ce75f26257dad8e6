"""
Sweeping the interbreeding probability
======================================

Without interbreeding every offspring comes from a single cluster's model,
so blocks found in different clusters never meet. This sweep shows the
effect on a 30-gene trap, writing a plot-ready CSV.

Run with ``python demos/03_parameter_sweep.py [out.csv]``.
"""
import sys

from phipbil import EngineConfig, parameter_sweep

base = EngineConfig(n0=1000, nw=200, k=10)
report = parameter_sweep("trapfive", 30, "p_c", [0.0, 0.25, 0.5, 0.75, 1.0], base,
                         replications=5, out=sys.argv[1] if len(sys.argv) > 1 else None)

# %%
# mean optima is the fraction of runs ending with the single optimum here

print(report.to_csv())
