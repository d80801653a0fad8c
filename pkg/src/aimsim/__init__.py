"""Simulator and benchmark harness for analog Ising machines.

The spin update interpolates between the time-discrete measurement-feedback
map (``h = 1``) and the Euler-integrated time-continuous machine
(``h << 1``); scans over the gain and coupling strength quantify how the
choice of ``h`` changes hyperparameter sensitivity.
"""

__version__ = "0.1.0"

from .problem import (IsingProblem, MaxCutInstance, ParseError, binarize, brute_force_optimum,
                      cut_value, ising_energy, load_benchmark, maxcut_to_ising, parse_maxcut)
from .dynamics import FeedbackMode, RunRecord, SimParams, SpinState, feedback, run, step
from .metrics import aoo, effective_coefficients, tsr
from .scan import GridSpec, ScanResult, bifurcation_scan, grid_scan, h_sweep, noise_sweep, runtime_sweep

__all__ = [
    "IsingProblem", "MaxCutInstance", "ParseError", "binarize", "brute_force_optimum", "cut_value",
    "ising_energy", "load_benchmark", "maxcut_to_ising", "parse_maxcut",
    "FeedbackMode", "RunRecord", "SimParams", "SpinState", "feedback", "run", "step",
    "aoo", "effective_coefficients", "tsr",
    "GridSpec", "ScanResult", "bifurcation_scan", "grid_scan", "h_sweep", "noise_sweep", "runtime_sweep",
]
