"""
Why h is not a rescaling of alpha and beta
==========================================

Expanding the update to third order in the amplitudes gives a linear
coefficient ``1 - h + h*alpha``, a cubic ``h*alpha**3/3`` and a coupling
``h*beta``. The cubic and coupling terms scale with ``h``, the linear term
does not, so no single factor maps one regime's good hyperparameters onto
the other's.
"""

#%%
from fractions import Fraction

import numpy as np

from aimsim.dynamics import euler_update, feedback
from aimsim.metrics import cubic_step, effective_coefficients
from aimsim.problem import IsingProblem

alpha, beta = Fraction("0.9"), Fraction("0.1")
for h in (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 100)):
    c = effective_coefficients(alpha, beta, h)
    print(f"h={str(h):5s} linear={float(c.linear):.4f} cubic={float(c.cubic):.5f} "
          f"coupling={float(c.coupling):.4f}  linear/alpha={float(c.linear / alpha):.3f} "
          f"coupling/beta={float(c.coupling / beta):.3f}")

#%%
# The truncated update tracks the full one for small amplitudes
# -------------------------------------------------------------
p = IsingProblem(np.array([[0.0, -1.0], [-1.0, 0.0]]))
for amp in (0.05, 0.1, 0.2, 0.4):
    x = np.array([amp, -amp / 2])
    full = euler_update(x, feedback(x, p, 0.9, 0.09), 0.0, 0.0, 0.5)
    print(f"|x|={amp:.2f}: max deviation {np.abs(full - cubic_step(x, p.coupling, 0.9, 0.09, 0.5)).max():.2e}")
