#!/usr/bin/env python3
"""Benchmark the hot kernels: numba @njit loops vs the pure-numpy fallback.

Run as `python benchmarks/bench_kernels.py`.  With NORMSPACE_NO_NUMBA=1 the
selected path is the numpy fallback, so both columns coincide.
"""

import time

import numpy as np

from normspace import _kernels as K


def bench(label, fn, args, repeat=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    print(f"  {label:<28s} {best * 1e3:10.3f} ms")
    return best


def main():
    rng = np.random.Generator(np.random.PCG64(0))
    print(f"numba active: {K.HAVE_NUMBA}")

    print("poly gauge, 48 facets x 200k directions")
    a = rng.standard_normal((48, 2))
    binv = 1.0 / rng.uniform(0.5, 2.0, size=48)
    x = rng.standard_normal((200_000, 2))
    t_sel = bench("selected path", K.poly_gauge_batch, (a, binv, x))
    t_np = bench("numpy fallback", K.poly_gauge_batch_numpy, (a, binv, x))
    if K.HAVE_NUMBA:
        print(f"  speedup: {t_np / t_sel:.2f}x")

    print("spd gauge, 3x3 x 200k directions")
    g = rng.standard_normal((3, 3))
    mat = g.T @ g + 0.25 * np.eye(3)
    x3 = rng.standard_normal((200_000, 3))
    t_sel = bench("selected path", K.spd_gauge_batch, (mat, x3))
    t_np = bench("numpy fallback", K.spd_gauge_batch_numpy, (mat, x3))
    if K.HAVE_NUMBA:
        print(f"  speedup: {t_np / t_sel:.2f}x")

    print("mvee weights, 60 points in R^3, tol 1e-9")
    pts = np.ascontiguousarray(rng.standard_normal((60, 3)))
    t_sel = bench("selected path", K.mvee_weights, (pts, 1e-9, 200_000))
    t_np = bench("numpy fallback", K.mvee_weights_numpy, (pts, 1e-9, 200_000))
    if K.HAVE_NUMBA:
        print(f"  speedup: {t_np / t_sel:.2f}x")

    print("extremal closure sweeps, 64-point metric")
    p = rng.standard_normal((64, 2))
    d = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)
    f0 = d.max(axis=1) + rng.uniform(0, 1, size=64)
    t_sel = bench("selected path", K.closure_sweeps, (d, f0.copy(), 1e-12, 1000))
    t_np = bench("numpy fallback", K.closure_sweeps_numpy, (d, f0.copy(), 1e-12, 1000))
    if K.HAVE_NUMBA:
        print(f"  speedup: {t_np / t_sel:.2f}x")


if __name__ == "__main__":
    main()
