"""
A single run of the time-discrete machine
=========================================

Simulates one run of the ``h = 1`` measurement-feedback machine on a
80-vertex benchmark graph and shows how the analog amplitudes start at
zero, grow, and split into the two spin branches while the Ising energy
drops toward the best-known value.
"""

#%%
import numpy as np

from aimsim.dynamics import SimParams, run, trajectory
from aimsim.problem import energy_to_cut, load_benchmark

inst, problem = load_benchmark("er05_80.1")
params = SimParams(alpha=0.85, beta=0.05, gamma=0.01, h=1.0, iterations=300, seed=1)

#%%
# Step 1. Energy and amplitudes per iteration
# -------------------------------------------
energies, amplitudes = trajectory(problem, params)
record = run(problem, params)
print(f"target energy {problem.known_optimum:g}, best reached {record.best_energy:g} "
      f"(cut {energy_to_cut(inst, record.best_energy):g}), success={record.success}")
for k in (0, 5, 20, 50, 299):
    print(f"iteration {k + 1:4d}: energy {energies[k]:8.1f}  mean |x| {np.abs(amplitudes[k]).mean():.3f}")

#%%
# Step 2. Plot (optional)
# -----------------------
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    top.plot(amplitudes, lw=0.6)
    top.set_ylabel("x_i")
    bottom.plot(energies)
    bottom.axhline(problem.known_optimum, color="k", ls="--", lw=0.8)
    bottom.set_ylabel("Ising energy")
    bottom.set_xlabel("iteration")
    fig.savefig("single_run.png", dpi=120)
