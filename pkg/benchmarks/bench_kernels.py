"""Benchmark the numba kernels against the pure-numpy fallback.

Run with:  python benchmarks/bench_kernels.py
The numpy path is always available; the numba path is skipped when numba
is not importable or FINGERKIT_NO_NUMBA is set.
"""

import math
import time

import numpy as np

from fingerkit import _kernels
from fingerkit.config import default_config
from fingerkit.linkage import loop_coefficients

N_SOLVE = 200_000
N_BISECT = 2_000
N_SCAN = 4096
REPEATS = 5


def bench(label, fn, *args):
    fn(*args)  # warmup (JIT compile / cache load)
    best = math.inf
    for _ in range(REPEATS):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    print(f"  {label:28s} {best * 1e3:10.3f} ms")
    return best


def main():
    cfg = default_config()
    c = loop_coefficients(cfg.geometry, 1)
    lo, hi = cfg.geometry.theta1_range
    f = cfg.geometry.theta4_fixed
    phi_solve = np.linspace(lo, hi, N_SOLVE)
    phi_bisect = np.linspace(lo, hi, N_BISECT)

    pairs = [
        ("loop_solve_batch",
         (_kernels.loop_solve_batch_numba, _kernels.loop_solve_batch_numpy),
         (c.kappa1, c.kappa2, c.kappa3, phi_solve, f, 1)),
        ("loop_sweep_continuity",
         (_kernels.loop_sweep_continuity_numba, _kernels.loop_sweep_continuity_numpy),
         (c.kappa1, c.kappa2, c.kappa3, phi_solve, f, -1.2)),
        ("loop_bisect_batch",
         (_kernels.loop_bisect_batch_numba, _kernels.loop_bisect_batch_numpy),
         (c.kappa1, c.kappa2, c.kappa3, phi_bisect, f, 1, 0.0, N_SCAN)),
    ]

    print(f"active backend: {_kernels.ACTIVE_BACKEND}")
    print(f"solve batch N={N_SOLVE}, bisect batch N={N_BISECT} (scan {N_SCAN})")
    for name, (fn_nb, fn_np), args in pairs:
        print(name)
        t_np = bench("numpy", fn_np, *args)
        if fn_nb is None:
            print("  numba                         unavailable")
            continue
        t_nb = bench("numba", fn_nb, *args)
        print(f"  {'speedup numpy/numba':28s} {t_np / t_nb:10.2f} x")


if __name__ == "__main__":
    main()
