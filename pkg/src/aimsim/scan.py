"""Brute-force hyperparameter scans.

A grid scan evaluates the TSR on every ``(alpha, beta)`` cell of an evenly
spaced, endpoint-inclusive lattice. Run ``r`` of cell ``(i, j)`` always
draws its noise from ``run_rng(master_seed, i, j, r)``, and each cell is
simulated as one batch, so the result does not depend on scheduling or on
the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import SimParams, run_rng, simulate
from .metrics import AooResult, TsrEstimate, aoo
from .problem import IsingProblem

DEFAULT_H_VALUES = (0.01, 0.05, 0.1, 0.25, 0.5, 1.0)
DEFAULT_GAMMA_VALUES = (0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0)
DEFAULT_ITERATION_VALUES = (100, 500, 1000, 2000, 5000, 10000)

SCAN_HEADER = ["alpha", "beta", "h", "gamma", "iterations", "runs", "successes", "tsr"]
SWEEP_HEADER = ["sweep_param", "value", "aoo_percent", "nonzero_cells", "total_cells"]
BIFURCATION_HEADER = ["alpha", "sample_index", "final_amplitude"]


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    # rounding keeps printed grid values short (0.525, not 0.5249999999999999)
    return np.round(np.linspace(lo, hi, steps), 12)


def _fmt(x) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class GridSpec:
    """Scan protocol; defaults are the 21 x 21 grid on [0.5, 1] x [0, 0.5]
    with 250 runs per cell."""

    alpha_min: float = 0.5
    alpha_max: float = 1.0
    beta_min: float = 0.0
    beta_max: float = 0.5
    alpha_steps: int = 21
    beta_steps: int = 21
    runs_per_cell: int = 250
    base_params: SimParams = field(default_factory=SimParams)

    def __post_init__(self):
        for name in ("alpha_min", "alpha_max", "beta_min", "beta_max"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.alpha_min > self.alpha_max:
            raise ValueError(f"alpha_min={self.alpha_min} exceeds alpha_max={self.alpha_max}")
        if self.beta_min > self.beta_max:
            raise ValueError(f"beta_min={self.beta_min} exceeds beta_max={self.beta_max}")
        for name in ("alpha_steps", "beta_steps", "runs_per_cell"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")

    @property
    def alphas(self) -> np.ndarray:
        return _axis(self.alpha_min, self.alpha_max, self.alpha_steps)

    @property
    def betas(self) -> np.ndarray:
        return _axis(self.beta_min, self.beta_max, self.beta_steps)

    @property
    def shape(self):
        return (self.alpha_steps, self.beta_steps)

    def with_params(self, **changes) -> "GridSpec":
        return GridSpec(self.alpha_min, self.alpha_max, self.beta_min, self.beta_max,
                        self.alpha_steps, self.beta_steps, self.runs_per_cell,
                        self.base_params.replace(**changes))


@dataclass(frozen=True, eq=False)
class ScanResult:
    grid: GridSpec
    successes: np.ndarray  # (alpha_steps, beta_steps) ints
    problem_name: str = ""

    @property
    def h(self) -> float:
        return self.grid.base_params.h

    @property
    def tsr(self) -> np.ndarray:
        return self.successes / self.grid.runs_per_cell

    def estimate(self, i: int, j: int) -> TsrEstimate:
        return TsrEstimate(int(self.successes[i, j]), self.grid.runs_per_cell)

    def to_csv(self) -> str:
        p, runs = self.grid.base_params, self.grid.runs_per_cell
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(SCAN_HEADER)
        for i, a in enumerate(self.grid.alphas):
            for j, b in enumerate(self.grid.betas):
                s = int(self.successes[i, j])
                w.writerow([_fmt(a), _fmt(b), _fmt(p.h), _fmt(p.gamma), p.iterations,
                            runs, s, _fmt(s / runs)])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# grid scans

_worker_ctx = None


def _init_worker(problem, grid, master_seed):
    global _worker_ctx
    _worker_ctx = (problem, grid, master_seed)


def _cell_successes(cell) -> int:
    i, j = cell
    problem, grid, master_seed = _worker_ctx
    runs = grid.runs_per_cell
    out = simulate(problem, grid.base_params,
                   [run_rng(master_seed, i, j, r) for r in range(runs)],
                   alpha=np.full(runs, grid.alphas[i]), beta=np.full(runs, grid.betas[j]),
                   target=problem.known_optimum, stop_when_solved=True)
    return int(out.success.sum())


def grid_scan(problem: IsingProblem, grid: GridSpec, master_seed: int = 0,
              workers: int = 1, progress: Optional[Callable[[int, int], None]] = None
              ) -> ScanResult:
    """TSR on every cell of ``grid``.

    ``progress(done, total)`` is called after each finished cell.
    """
    if problem.known_optimum is None:
        raise ValueError(f"problem {problem.name!r} has no known optimum; cannot score runs")
    cells = [(i, j) for i in range(grid.alpha_steps) for j in range(grid.beta_steps)]
    successes = np.zeros(grid.shape, dtype=np.int64)
    total = len(cells)

    def collect(results):
        for done, (cell, s) in enumerate(zip(cells, results), start=1):
            successes[cell] = s
            if progress is not None:
                progress(done, total)

    if workers <= 1:
        _init_worker(problem, grid, master_seed)
        try:
            collect(map(_cell_successes, cells))
        finally:
            _init_worker(None, None, None)
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(problem, grid, master_seed)) as pool:
            collect(pool.map(_cell_successes, cells, chunksize=max(1, total // (4 * workers))))
    return ScanResult(grid, successes, problem.name)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    aoo: AooResult


def _sweep(problem, grid, param, values, master_seed, workers, progress):
    values = list(values)
    if not values:
        raise ValueError(f"{param} sweep needs at least one value")
    rows = []
    for v in values:
        scan = grid_scan(problem, grid.with_params(**{param: v}), master_seed, workers, progress)
        rows.append(SweepRow(param, v, aoo(scan)))
    return rows


def h_sweep(problem: IsingProblem, grid: GridSpec, h_values: Sequence[float] = DEFAULT_H_VALUES,
            master_seed: int = 0, workers: int = 1, progress=None) -> list:
    """AOO per Euler step. Every scan reuses the same per-run noise streams."""
    return _sweep(problem, grid, "h", h_values, master_seed, workers, progress)


def noise_sweep(problem: IsingProblem, grid: GridSpec,
                gamma_values: Sequence[float] = DEFAULT_GAMMA_VALUES,
                master_seed: int = 0, workers: int = 1, progress=None) -> list:
    return _sweep(problem, grid, "gamma", gamma_values, master_seed, workers, progress)


def runtime_sweep(problem: IsingProblem, grid: GridSpec,
                  iteration_values: Sequence[int] = DEFAULT_ITERATION_VALUES,
                  master_seed: int = 0, workers: int = 1, progress=None) -> list:
    return _sweep(problem, grid, "iterations", iteration_values, master_seed, workers, progress)


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(SWEEP_HEADER)
    for r in rows:
        value = r.value if r.param == "iterations" else _fmt(r.value)
        w.writerow([r.param, value, _fmt(r.aoo.percent), r.aoo.nonzero_cells, r.aoo.total_cells])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# bifurcation


@dataclass(frozen=True, eq=False)
class BifurcationScan:
    alphas: np.ndarray
    final_amplitudes: np.ndarray  # (len(alphas), samples)
    detected_threshold: Optional[float]
    floor: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(BIFURCATION_HEADER)
        for a, xs in zip(self.alphas, self.final_amplitudes):
            for k, x in enumerate(xs):
                w.writerow([_fmt(a), k, _fmt(x)])
        thr = "not detected" if self.detected_threshold is None else _fmt(self.detected_threshold)
        buf.write(f"# detected_threshold={thr}\r\n")
        return buf.getvalue()


def alpha_range(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive, evenly spaced gains from ``start`` to ``stop``."""
    if step <= 0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def bifurcation_scan(alphas, samples_per_alpha: int = 80,
                     params: Optional[SimParams] = None, floor: Optional[float] = None,
                     init_amplitude: Optional[float] = None) -> BifurcationScan:
    """Final amplitudes of uncoupled spins as a function of the gain.

    Spins start at alternating ``+-init_amplitude`` (default: the detection
    floor), so an amplitude ending above the floor has grown, meaning the
    zero state is unstable at that gain. The detected threshold is the
    smallest gain whose median final ``|x|`` exceeds ``floor`` (default
    ``10 * gamma``); ``None`` if no gain qualifies.
    """
    if params is None:
        params = SimParams(beta=0.0, gamma=0.001, h=0.01, iterations=500)
    if params.beta != 0:
        raise ValueError("bifurcation scans are uncoupled; beta must be 0")
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim != 1 or alphas.size == 0:
        raise ValueError("need a non-empty 1-d array of gains")
    floor = 10.0 * params.gamma if floor is None else float(floor)
    eps = floor if init_amplitude is None else float(init_amplitude)
    n = int(samples_per_alpha)
    uncoupled = IsingProblem(np.zeros((n, n)))
    x0 = eps * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)

    finals = np.empty((alphas.size, n))
    for i, a in enumerate(alphas):
        out = simulate(uncoupled, params.replace(alpha=float(a)),
                       [run_rng(params.seed, i)], x0=x0)
        finals[i] = out.final_x[0]
    above = np.median(np.abs(finals), axis=1) > floor
    threshold = float(alphas[np.argmax(above)]) if above.any() else None
    return BifurcationScan(alphas, finals, threshold, floor)
