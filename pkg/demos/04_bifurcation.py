"""
Pitchfork bifurcation of uncoupled spins
========================================

With the coupling switched off, each spin follows
``x' = (1-h) x + h tanh(alpha x + noise)``. The zero state loses stability at
``alpha = 1`` for any ``h``; above it the amplitudes settle on the two
roots of ``x = tanh(alpha x)``.
"""

#%%
import numpy as np

from aimsim.dynamics import SimParams
from aimsim.scan import alpha_range, bifurcation_scan

alphas = alpha_range(0.5, 1.5, 0.05)
for h in (0.01, 0.25, 1.0):
    scan = bifurcation_scan(alphas, 80, SimParams(beta=0.0, gamma=0.001, h=h, iterations=500))
    print(f"h={h}: detected threshold {scan.detected_threshold}")

#%%
# Noise-free branches after a long settle, against the fixed points
# -----------------------------------------------------------------
scan = bifurcation_scan(alpha_range(1.1, 2.0, 0.1), 2,
                        SimParams(beta=0.0, gamma=0.0, h=1.0, iterations=4000),
                        floor=1e-3, init_amplitude=1e-3)
for a, xs in zip(scan.alphas, scan.final_amplitudes):
    print(f"alpha={a:.1f}: branches {xs[0]:+.4f} {xs[1]:+.4f}  "
          f"residual {abs(xs[0] - np.tanh(a * xs[0])):.1e}")
