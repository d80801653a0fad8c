"""
Shrinking area of operation at h = 1
====================================

Brute-force (alpha, beta) scans of the transient success rate on a 60-spin
benchmark, once with the Euler step ``h = 0.01`` (close to the
time-continuous machine) and once with ``h = 1`` (measurement feedback).
A reduced budget keeps this to a couple of minutes on one core; pass
``--full`` for the 21 x 21 / 250 run / 5000 iteration protocol.
"""

#%%
import sys

from aimsim.dynamics import SimParams
from aimsim.metrics import aoo
from aimsim.problem import load_benchmark
from aimsim.scan import GridSpec, grid_scan

full = "--full" in sys.argv
grid = GridSpec() if full else GridSpec(alpha_steps=11, beta_steps=11, runs_per_cell=50,
                                        base_params=SimParams(iterations=2000))
_, problem = load_benchmark("er05_60.0")

#%%
# Step 1. Scan both regimes with the same per-run noise streams
# -------------------------------------------------------------
scans = {h: grid_scan(problem, grid.with_params(h=h), master_seed=0) for h in (0.01, 1.0)}

#%%
# Step 2. Compare the TSR maps (rows: alpha, columns: beta)
# ---------------------------------------------------------
for h, scan in scans.items():
    a = aoo(scan)
    print(f"\nh = {h}: AOO {a.percent:.1f}% ({a.nonzero_cells}/{a.total_cells} cells)")
    for alpha, row in zip(grid.alphas, scan.tsr):
        print(f"  alpha={alpha:5.3f} " + " ".join("  ." if t == 0 else f"{t:3.1f}" for t in row))
