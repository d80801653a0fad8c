"""
Build the shipped benchmark set
===============================

Generates the density-0.5 unit-weight random graphs shipped in
``src/aimsim/data`` (60, 80 and 100 vertices, ten instances each, the same
shape as the BiqMac ``g05`` family) and records a best-known cut for each
one in ``optima.txt``.

The best-known cut comes from a restarted one-flip tabu search. Each
instance is searched until the best cut has been rediscovered by several
independent restarts, which for graphs of this size is a strong (though
not a proof-level) indication of optimality.

Run from the repository root::

    python demos/build_benchmarks.py
"""

#%%
import sys
from pathlib import Path

import numpy as np

from aimsim.problem import cut_value, random_maxcut, serialize_maxcut

DATA = Path(__file__).resolve().parent.parent / "src" / "aimsim" / "data"
SIZES = (60, 80, 100)
INSTANCES = 10


#%%
# Step 1. One-flip tabu search
# ----------------------------
# ``ws = W @ s`` is kept up to date so the gain of flipping vertex i,
# ``s_i * ws_i``, costs O(n) per move.

def tabu_maxcut(w, rng, moves=None, tenure=None):
    n = w.shape[0]
    moves = moves or 200 * n
    tenure = tenure or max(3, n // 10)
    s = rng.choice([-1.0, 1.0], size=n)
    ws = w @ s
    cut = 0.25 * (w.sum() - s @ ws)
    best_cut, best_s = cut, s.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    for it in range(moves):
        gain = s * ws
        allowed = (tabu_until <= it) | (cut + gain > best_cut)
        gain = np.where(allowed, gain, -np.inf)
        i = int(np.argmax(gain))
        cut += gain[i]
        ws -= 2.0 * s[i] * w[:, i]
        s[i] = -s[i]
        tabu_until[i] = it + tenure + rng.integers(0, 3)
        if cut > best_cut:
            best_cut, best_s = cut, s.copy()
    return best_cut, best_s


def best_known_cut(w, seed, confirmations=5, max_restarts=400):
    rng = np.random.default_rng(seed)
    best, hits = -np.inf, 0
    for _ in range(max_restarts):
        c, s = tabu_maxcut(w, rng)
        if c > best:
            best, hits, best_s = c, 1, s
        elif c == best:
            hits += 1
        if hits >= confirmations:
            break
    return best, best_s, hits


#%%
# Step 2. Generate instances and search for their cuts
# ----------------------------------------------------

def main():
    DATA.mkdir(parents=True, exist_ok=True)
    records = []
    for n in SIZES:
        for idx in range(INSTANCES):
            name = f"er05_{n}.{idx}"
            inst = random_maxcut(n, density=0.5, low=1, high=1, seed=100 * n + idx, name=name)
            (DATA / f"{name}.txt").write_text(serialize_maxcut(inst), encoding="utf-8")
            cut, s, hits = best_known_cut(inst.weights, seed=idx)
            assert cut_value(inst, s) == cut
            records.append((name, int(cut)))
            print(f"{name}: best cut {int(cut)} (found by {hits} restarts)", file=sys.stderr)
    lines = ["# best-known cut values (restarted tabu search, see demos/build_benchmarks.py)"]
    lines += [f"{name}  {cut}" for name, cut in records]
    (DATA / "optima.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
