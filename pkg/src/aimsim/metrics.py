"""Success metrics and the small-amplitude expansion of the update rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class TsrEstimate:
    """Transient success rate: fraction of runs that hit the target at any
    iteration."""

    successes: int
    runs: int

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("TSR needs at least one run")
        if not 0 <= self.successes <= self.runs:
            raise ValueError(f"successes={self.successes} outside [0, {self.runs}]")

    @property
    def value(self) -> float:
        return self.successes / self.runs

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.successes, self.runs)


@dataclass(frozen=True)
class AooResult:
    """Area of operation: percentage of grid cells with nonzero TSR.

    Only comparable between scans sharing problem, bounds and resolution,
    so the bounds travel with the value.
    """

    nonzero_cells: int
    total_cells: int
    bounds: Optional[Tuple[float, float, float, float]] = None

    @property
    def percent(self) -> float:
        return 100.0 * self.nonzero_cells / self.total_cells


@dataclass(frozen=True)
class EffectiveCoefficients:
    linear: float
    cubic: float
    coupling: float


def tsr(records: Iterable) -> TsrEstimate:
    records = list(records)
    if not records:
        raise ValueError("cannot estimate a TSR from zero runs")
    return TsrEstimate(sum(1 for r in records if r.success), len(records))


def aoo(scan) -> AooResult:
    """AOO of a :class:`~aimsim.scan.ScanResult` or of a raw TSR/success
    matrix. Cells holding NaN count as not evaluated and are rejected."""
    bounds = None
    if hasattr(scan, "successes"):
        values = np.asarray(scan.successes, dtype=float)
        g = scan.grid
        bounds = (g.alpha_min, g.alpha_max, g.beta_min, g.beta_max)
    else:
        values = np.asarray(scan, dtype=float)
    if values.size == 0:
        raise ValueError("empty scan grid")
    if np.isnan(values).any():
        raise ValueError(f"incomplete scan: {int(np.isnan(values).sum())} cells not evaluated")
    return AooResult(int(np.count_nonzero(values > 0)), int(values.size), bounds)


def effective_coefficients(alpha: float, beta: float, h: float) -> EffectiveCoefficients:
    """Coefficients of the third-order expansion of one update in the
    weak-coupling regime::

        x' = linear * x - cubic * x**3 + coupling * sum_j J_ij x_j

    At ``h = 1`` these reduce to ``(alpha, alpha**3 / 3, beta)``.
    """
    if not 0 < h <= 1:
        raise ValueError(f"h must lie in (0, 1], got {h}")
    # integer literals keep Fraction inputs exact
    return EffectiveCoefficients(1 - h + h * alpha, h * alpha**3 / 3, h * beta)


def cubic_step(x, coupling: np.ndarray, alpha: float, beta: float, h: float) -> np.ndarray:
    """One noise-free update using the truncated expansion instead of tanh."""
    c = effective_coefficients(alpha, beta, h)
    x = np.asarray(x, dtype=float)
    return c.linear * x - c.cubic * x**3 + c.coupling * (x @ coupling)
