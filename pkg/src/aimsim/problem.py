"""MaxCut and Ising problem instances.

Instance files use the plain edge-list layout of the BiqMac / rudy
benchmark collections::

    n m
    i j w      (m lines, 1-based vertex indices)

Lines starting with ``#`` are comments. Best-known solutions live in a
separate sidecar file with one ``name  best-cut`` record per line.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, TextIO, Union

import numpy as np

#: Largest spin count accepted by :func:`brute_force_optimum`.
MAX_BRUTE_FORCE_SPINS = 24


class ParseError(ValueError):
    """Malformed instance or metadata file; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_symmetric(m: np.ndarray, what: str):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError(f"{what} must be symmetric")
    if np.any(np.diag(m) != 0):
        raise ValueError(f"{what} must have a zero diagonal")


@dataclass(frozen=True, eq=False)
class MaxCutInstance:
    """Weighted undirected graph given by its symmetric weight matrix."""

    weights: np.ndarray
    name: str = ""

    def __post_init__(self):
        w = _frozen(self.weights)
        _check_symmetric(w, "weights")
        if w.shape[0] < 1:
            raise ValueError("instance needs at least one vertex")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total_weight(self) -> float:
        """Sum of edge weights, each edge counted once."""
        return float(np.triu(self.weights, 1).sum())

    def edges(self):
        """Yield ``(i, j, w)`` for every nonzero edge with ``i < j`` (0-based)."""
        iu, ju = np.nonzero(np.triu(self.weights, 1))
        for i, j in zip(iu, ju):
            yield int(i), int(j), float(self.weights[i, j])

    def __eq__(self, other):
        if not isinstance(other, MaxCutInstance):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """Ising Hamiltonian ``H = -1/2 sum_ij J_ij s_i s_j - sum_i b_i s_i``.

    ``known_optimum`` is the target energy a run has to reach to count as
    a success; it is optional because not every problem has one.
    """

    coupling: np.ndarray
    field: Optional[np.ndarray] = None
    known_optimum: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        J = _frozen(self.coupling)
        _check_symmetric(J, "coupling")
        b = np.zeros(J.shape[0]) if self.field is None else _frozen(self.field)
        if b.shape != (J.shape[0],):
            raise ValueError(f"field has shape {b.shape}, expected ({J.shape[0]},)")
        b = _frozen(b)
        object.__setattr__(self, "coupling", J)
        object.__setattr__(self, "field", b)
        if self.known_optimum is not None:
            object.__setattr__(self, "known_optimum", float(self.known_optimum))

    @property
    def n(self) -> int:
        return self.coupling.shape[0]

    @property
    def has_field(self) -> bool:
        return bool(np.any(self.field != 0))

    def with_target(self, energy: Optional[float]) -> "IsingProblem":
        return IsingProblem(self.coupling, self.field, energy, self.name)


# ---------------------------------------------------------------------------
# parsing and serialization


def _data_lines(text: Union[str, TextIO]):
    stream = io.StringIO(text) if isinstance(text, str) else text
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def parse_maxcut(text: Union[str, TextIO], name: str = "") -> MaxCutInstance:
    """Parse an ``n m`` / ``i j w`` edge list.

    Repeated edges are tolerated only when they carry the same weight.
    """
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("missing header line 'n m'") from None
    if len(header) != 2:
        raise ParseError(f"header must be 'n m', got {' '.join(header)!r}", lineno)
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"non-integer header {' '.join(header)!r}", lineno) from None
    if n < 1 or m < 0:
        raise ParseError(f"invalid header values n={n}, m={m}", lineno)

    w = np.zeros((n, n))
    seen = set()
    count = 0
    for lineno, tok in lines:
        if len(tok) != 3:
            raise ParseError(f"edge line must be 'i j w', got {' '.join(tok)!r}", lineno)
        try:
            i, j = int(tok[0]), int(tok[1])
            weight = float(tok[2])
        except ValueError:
            raise ParseError(f"cannot parse edge {' '.join(tok)!r}", lineno) from None
        for v in (i, j):
            if not 1 <= v <= n:
                raise ParseError(f"vertex index {v} outside [1, {n}]", lineno)
        if i == j:
            raise ParseError(f"self-loop on vertex {i}", lineno)
        if not np.isfinite(weight):
            raise ParseError(f"non-finite weight {tok[2]!r}", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            if w[i - 1, j - 1] != weight:
                raise ParseError(
                    f"edge {key[0]} {key[1]} repeated with conflicting weight "
                    f"{weight:g} (was {w[i - 1, j - 1]:g})",
                    lineno,
                )
        seen.add(key)
        w[i - 1, j - 1] = w[j - 1, i - 1] = weight
        count += 1
    if count != m:
        raise ParseError(f"header announces {m} edges but {count} were found")
    return MaxCutInstance(w, name)


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def serialize_maxcut(instance: MaxCutInstance) -> str:
    edges = list(instance.edges())
    out = [f"{instance.n} {len(edges)}"]
    out += [f"{i + 1} {j + 1} {_fmt_number(w)}" for i, j, w in edges]
    return "\n".join(out) + "\n"


def read_maxcut(path: Union[str, Path]) -> MaxCutInstance:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_maxcut(fh, name=path.stem if path.suffix in (".txt", ".mc") else path.name)


def parse_optima(text: Union[str, TextIO]) -> dict:
    """Parse ``name  best-cut`` records into a ``{name: cut}`` dict."""
    optima = {}
    for lineno, tok in _data_lines(text):
        if len(tok) != 2:
            raise ParseError("optimum record must be 'name value'", lineno)
        try:
            optima[tok[0]] = float(tok[1])
        except ValueError:
            raise ParseError(f"non-numeric optimum {tok[1]!r}", lineno) from None
    return optima


def read_optima(path: Union[str, Path]) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_optima(fh)


# ---------------------------------------------------------------------------
# energies


def maxcut_to_ising(instance: MaxCutInstance) -> IsingProblem:
    """``J = -w``, no external field. The target is attached separately."""
    return IsingProblem(-instance.weights, None, None, instance.name)


def cut_to_energy(instance: MaxCutInstance, cut: float) -> float:
    """Ising energy of a configuration with the given cut value."""
    # H = -(2C + 1/2 sum_ij J_ij) with J = -w
    return -(2.0 * cut - 0.5 * float(instance.weights.sum()))


def energy_to_cut(instance: MaxCutInstance, energy: float) -> float:
    return 0.5 * (0.5 * float(instance.weights.sum()) - energy)


def _as_config(config, n: int) -> np.ndarray:
    s = np.asarray(config)
    if s.shape[-1:] != (n,):
        raise ValueError(f"configuration has length {s.shape[-1:]}, expected {n}")
    return s.astype(float, copy=False)


def ising_energy(problem: IsingProblem, config) -> Union[float, np.ndarray]:
    """Energy of one configuration, or of each row of a ``(..., n)`` stack."""
    s = _as_config(config, problem.n)
    energy = -0.5 * np.einsum("...i,...i->...", s @ problem.coupling, s) - s @ problem.field
    return float(energy) if energy.ndim == 0 else energy


def cut_value(instance: MaxCutInstance, config) -> Union[float, np.ndarray]:
    """Total weight of edges whose endpoints carry different spins."""
    s = _as_config(config, instance.n)
    same = np.einsum("...i,...i->...", s @ instance.weights, s)
    cut = 0.25 * (instance.weights.sum() - same)
    return float(cut) if cut.ndim == 0 else cut


def binarize(x) -> np.ndarray:
    """Sign of each amplitude, with ``sign(0) = +1``."""
    x = np.asarray(x)
    return np.where(x >= 0, 1, -1).astype(np.int8)


def all_configurations(n: int) -> np.ndarray:
    """Every configuration of ``n`` spins as a ``(2**n, n)`` int8 array."""
    codes = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def brute_force_optimum(problem: IsingProblem, chunk: int = 1 << 16):
    """Exact ground state by enumeration; returns ``(energy, config)``.

    Without a field the spin-flip symmetry halves the work: spin ``n-1`` is
    pinned to ``+1``.
    """
    n = problem.n
    if n > MAX_BRUTE_FORCE_SPINS:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_SPINS}, got {n}")
    free = n - 1 if not problem.has_field else n
    best_e, best_s = np.inf, None
    total = 1 << free
    shifts = np.arange(free)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)[:, None]
        s = np.ones((codes.shape[0], n))
        s[:, :free] = 1 - 2 * ((codes >> shifts) & 1)
        e = ising_energy(problem, s)
        k = int(np.argmin(e))
        if e[k] < best_e:
            best_e, best_s = float(e[k]), s[k].astype(np.int8)
    return best_e, best_s


# ---------------------------------------------------------------------------
# generators and shipped benchmarks


def random_maxcut(n: int, density: float = 0.5, low: int = 1, high: int = 1,
                  seed: int = 0, name: str = "") -> MaxCutInstance:
    """Erdős–Rényi graph with each edge present with probability ``density``
    and an integer weight drawn uniformly from ``[low, high]``.

    Edges of weight 0 drawn from the range are simply absent.
    """
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    present = rng.random(iu[0].size) < density
    w_edge = rng.integers(low, high + 1, size=iu[0].size) * present
    w = np.zeros((n, n))
    w[iu] = w_edge
    return MaxCutInstance(w + w.T, name or f"er_{n}_{seed}")


def benchmark_names() -> list:
    root = resources.files("aimsim") / "data"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".txt")
                  and p.name != "optima.txt")


def benchmark_optima() -> dict:
    text = (resources.files("aimsim") / "data" / "optima.txt").read_text(encoding="utf-8")
    return parse_optima(text)


def load_benchmark(name: str):
    """Shipped instance by name, as ``(MaxCutInstance, IsingProblem)``.

    The Ising problem carries the best-known cut converted to an energy.
    """
    res = resources.files("aimsim") / "data" / f"{name}.txt"
    if not res.is_file():
        raise KeyError(f"unknown benchmark {name!r}; available: {', '.join(benchmark_names())}")
    inst = parse_maxcut(res.read_text(encoding="utf-8"), name=name)
    return inst, attach_optimum(inst, benchmark_optima())


def attach_optimum(instance: MaxCutInstance, optima: dict) -> IsingProblem:
    """Ising form of ``instance`` with its target looked up in ``optima``."""
    problem = maxcut_to_ising(instance)
    cut = optima.get(instance.name)
    return problem if cut is None else problem.with_target(cut_to_energy(instance, cut))
