"""Spin dynamics of the analog Ising machine.

One iteration updates the analog amplitudes as

    x[k] = (1 - h) x[k-1] + h tanh(f[k-1] + gamma * zeta[k])

with feedback ``f = alpha x + beta J x + b``. ``h = 1`` is the time-discrete
measurement-feedback machine; small ``h`` is the Euler discretization of the
time-continuous machine.

Every run owns a Philox (counter-based) stream keyed by a
:class:`numpy.random.SeedSequence`, so results depend only on the seed and
the run's key, never on how runs are batched or scheduled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .problem import IsingProblem, binarize

#: Runs reaching ``known_optimum + ENERGY_TOL`` count as successful.
ENERGY_TOL = 1e-9

DEFAULT_GAMMA = 0.01
DEFAULT_ITERATIONS = 5000

# upper bound on buffered noise values per batch (floats)
_NOISE_BUFFER = 1 << 20


class FeedbackMode(str, enum.Enum):
    AMPLITUDE = "amplitude"
    SPIN_SIGN = "spin-sign"


@dataclass(frozen=True)
class SimParams:
    """Everything that defines one stochastic run."""

    alpha: float = 0.9
    beta: float = 0.1
    gamma: float = DEFAULT_GAMMA
    h: float = 1.0
    iterations: int = DEFAULT_ITERATIONS
    feedback_mode: FeedbackMode = FeedbackMode.AMPLITUDE
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if not 0 < self.h <= 1:
            raise ValueError(f"h must lie in (0, 1], got {self.h}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        object.__setattr__(self, "iterations", int(self.iterations))
        object.__setattr__(self, "feedback_mode", FeedbackMode(self.feedback_mode))

    def replace(self, **changes) -> "SimParams":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SpinState:
    x: np.ndarray
    k: int = 0

    @classmethod
    def zeros(cls, n: int) -> "SpinState":
        return cls(np.zeros(n), 0)


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Outcome of one run. ``success`` means the target was hit at some
    iteration, not necessarily in the final state."""

    success: bool
    best_energy: float
    first_success_iteration: Optional[int]
    final_config: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        return (self.success == other.success
                and self.best_energy == other.best_energy
                and self.first_success_iteration == other.first_success_iteration
                and np.array_equal(self.final_config, other.final_config))

    __hash__ = None


def run_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def spin_sign(x: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def feedback(x, problem: IsingProblem, alpha, beta,
             mode: FeedbackMode = FeedbackMode.AMPLITUDE) -> np.ndarray:
    """Feedback signal for amplitudes ``x`` of shape ``(n,)`` or ``(runs, n)``.

    ``alpha`` and ``beta`` may be scalars or ``(runs, 1)`` columns.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (problem.n,):
        raise ValueError(f"amplitudes have length {x.shape[-1:]}, expected {problem.n}")
    coupled = spin_sign(x) if FeedbackMode(mode) is FeedbackMode.SPIN_SIGN else x
    # J is symmetric, so x @ J == (J @ x.T).T row by row
    return alpha * x + beta * (coupled @ problem.coupling) + problem.field


def euler_update(x, f, zeta, gamma: float, h: float) -> np.ndarray:
    return (1.0 - h) * x + h * np.tanh(f + gamma * zeta)


def step(state: SpinState, problem: IsingProblem, params: SimParams,
         rng: np.random.Generator) -> SpinState:
    """Advance one iteration, drawing one fresh normal per spin from ``rng``."""
    zeta = rng.standard_normal(problem.n)
    f = feedback(state.x, problem, params.alpha, params.beta, params.feedback_mode)
    return SpinState(euler_update(state.x, f, zeta, params.gamma, params.h), state.k + 1)


@dataclass
class BatchOutcome:
    best_energy: np.ndarray
    first_success: np.ndarray  # 0 where the target was never reached
    final_x: np.ndarray
    iterations_done: int

    @property
    def success(self) -> np.ndarray:
        return self.first_success > 0

    def record(self, i: int) -> RunRecord:
        k = int(self.first_success[i])
        return RunRecord(k > 0, float(self.best_energy[i]), k if k > 0 else None,
                         binarize(self.final_x[i]))


def simulate(problem: IsingProblem, params: SimParams,
             rngs: Sequence[np.random.Generator], alpha=None, beta=None,
             x0=None, target: Optional[float] = None, stop_when_solved: bool = False,
             trace: Optional[list] = None) -> BatchOutcome:
    """Run ``len(rngs)`` independent trajectories side by side.

    ``alpha``/``beta`` override ``params`` and may hold one value per run.
    Each run consumes its own generator sequentially, ``n`` normals per
    iteration, so row ``r`` is identical to simulating it alone with
    ``rngs[r]`` (up to BLAS batching). With ``stop_when_solved`` the loop
    exits as soon as every run has hit ``target``. ``trace``, if given,
    receives ``(k, energies, x)`` after every iteration.
    """
    runs, n = len(rngs), problem.n
    a = params.alpha if alpha is None else np.asarray(alpha, float).reshape(-1, 1)
    b = params.beta if beta is None else np.asarray(beta, float).reshape(-1, 1)
    x = np.zeros((runs, n)) if x0 is None else np.array(np.broadcast_to(x0, (runs, n)), float)
    h, gamma, mode = params.h, params.gamma, params.feedback_mode
    J = problem.coupling
    threshold = -np.inf if target is None else target + ENERGY_TOL

    best = np.full(runs, np.inf)
    first = np.zeros(runs, dtype=np.int64)
    chunk = max(1, min(params.iterations, _NOISE_BUFFER // max(1, runs * n)))
    k = 0
    while k < params.iterations:
        c = min(chunk, params.iterations - k)
        noise = np.stack([g.standard_normal((c, n)) for g in rngs], axis=1)
        for t in range(c):
            f = feedback(x, problem, a, b, mode)
            x = euler_update(x, f, noise[t], gamma, h)
            k += 1
            s = spin_sign(x)
            e = -0.5 * np.einsum("ri,ri->r", s @ J, s) - s @ problem.field
            np.minimum(best, e, out=best)
            first[(first == 0) & (e <= threshold)] = k
            if trace is not None:
                trace.append((k, e, x))
            if stop_when_solved and np.all(first > 0):
                return BatchOutcome(best, first, x, k)
    return BatchOutcome(best, first, x, k)


def run(problem: IsingProblem, params: SimParams, evaluate_success: bool = True) -> RunRecord:
    """Single run from ``x = 0`` for ``params.iterations`` iterations.

    Energies of the binarized state are tracked after every iteration; the
    run succeeds when any of them reaches ``problem.known_optimum``.
    """
    if evaluate_success and problem.known_optimum is None:
        raise ValueError(f"problem {problem.name!r} has no known optimum to evaluate success")
    target = problem.known_optimum if evaluate_success else None
    out = simulate(problem, params, [run_rng(params.seed)], target=target)
    return out.record(0)


def trajectory(problem: IsingProblem, params: SimParams):
    """Energy and amplitude history of a single run.

    Returns ``(energies, amplitudes)`` with shapes ``(iterations,)`` and
    ``(iterations, n)``; row ``k`` is the state after iteration ``k + 1``.
    """
    trace = []
    simulate(problem, params, [run_rng(params.seed)], trace=trace)
    energies = np.array([e[0] for _, e, _ in trace])
    amplitudes = np.array([x[0] for _, _, x in trace])
    return energies, amplitudes
