"""Benchmark the compiled kernels against the pure numpy fallback.

Imports both backend modules directly (bypassing the import-time
selection), times the three hot kernels on realistic shapes, and checks
that the outputs agree bit for bit.

Run:  python3 bench/bench_kernels.py  (--quick shrinks the shapes for smoke
tests)
"""

import argparse
import time

import numpy as np

from treegreen._kernels import _core_py
from treegreen.model import TreeParams

try:
    from treegreen._kernels import _core_cy
except ImportError:
    _core_cy = None


def _timeit(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pop_step(mod, n=200_000, k=2, seed=0):
    r = np.random.default_rng(seed)
    pool = (r.standard_normal(n) + 1j * (0.1 + r.random(n))).astype(np.complex128)
    idx = r.integers(0, n, size=n * k).astype(np.int64)
    w = r.standard_normal(n)
    return _timeit(mod.pop_step_values, pool, idx, w, 0.3, 1e-3, k)


def bench_tree_sweep(mod, depth=16, k=2, seed=0):
    params = TreeParams(k, depth=depth)
    offsets = params.level_offsets()
    r = np.random.default_rng(seed)
    w = r.standard_normal(params.n_vertices)
    return _timeit(mod.tree_sweep, w, 0.2, 1e-2, k, offsets, repeat=3)


def bench_chain_many(mod, m=2000, chains=2000, k=2, seed=0):
    r = np.random.default_rng(seed)
    w = np.ascontiguousarray(r.standard_normal((m, chains)))
    return _timeit(mod.chain_many, w, 0.1, 1e-3, k)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="small shapes, for smoke testing")
    args = parser.parse_args()
    if args.quick:
        benches = (("pop_step_values", lambda m: bench_pop_step(m, n=20_000)),
                   ("tree_sweep", lambda m: bench_tree_sweep(m, depth=12)),
                   ("chain_many", lambda m: bench_chain_many(m, m=200,
                                                             chains=500)))
    else:
        benches = (("pop_step_values", bench_pop_step),
                   ("tree_sweep", bench_tree_sweep),
                   ("chain_many", bench_chain_many))
    if _core_cy is None:
        print("compiled backend unavailable; benchmarking fallback only")
    rows = []
    for name, bench in benches:
        t_py, out_py = bench(_core_py)
        if _core_cy is not None:
            t_cy, out_cy = bench(_core_cy)
            identical = np.array_equal(np.asarray(out_py), np.asarray(out_cy))
            rows.append((name, t_py, t_cy, t_py / t_cy, identical))
        else:
            rows.append((name, t_py, None, None, True))

    print(f"{'kernel':<18}{'numpy':>10}{'cython':>10}{'speedup':>9}  bit-identical")
    for name, t_py, t_cy, speed, same in rows:
        cy = f"{t_cy * 1e3:8.2f}ms" if t_cy is not None else "       -"
        sp = f"{speed:8.2f}x" if speed is not None else "        -"
        print(f"{name:<18}{t_py * 1e3:8.2f}ms{cy}{sp}  {same}")
    if not all(r[-1] for r in rows):
        raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
