#!/usr/bin/env python3
"""Benchmark the numba hot kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_accel.py [--repeat N]

The same two kernels back the whole library: bump-derivative evaluation
over quadrature nodes and the oscillatory transform over frequency grids.
Set HORIZON_NUMBA=0 to force the fallback at import time in the library
itself; here both implementations are timed side by side.
"""

import argparse
import time

import numpy as np

from horizon import _accel
from horizon.kernels import _bump_poly_float


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bump_derivatives(repeat):
    rng = np.random.default_rng(0)
    u = rng.uniform(-1.0, 1.0, size=200_000)
    print("bump_derivative_values (200k nodes)")
    for k in (2, 8, 14):
        pk = _bump_poly_float(k)
        t_np = timeit(lambda: _accel.bump_derivative_values_numpy(u, pk, k), repeat)
        if _accel.HAS_NUMBA:
            _accel.bump_derivative_values_numba(u, pk, k)  # compile once
            t_nb = timeit(lambda: _accel.bump_derivative_values_numba(u, pk, k), repeat)
            print(f"  k={k:2d}: numpy {t_np * 1e3:8.2f} ms   numba {t_nb * 1e3:8.2f} ms"
                  f"   speedup {t_np / t_nb:5.1f}x")
        else:
            print(f"  k={k:2d}: numpy {t_np * 1e3:8.2f} ms   (numba unavailable)")


def bench_transform(repeat):
    rng = np.random.default_rng(1)
    t = np.sort(rng.uniform(-1.0, 1.0, size=1072))
    w = rng.uniform(0.0, 1e-3, size=1072)
    f = rng.normal(size=1072)
    om = np.linspace(-200.0, 200.0, 8192)
    print("oscillatory_transform (8192 frequencies x 1072 nodes)")
    t_np = timeit(lambda: _accel.oscillatory_transform_numpy(t, w, f, om), repeat)
    if _accel.HAS_NUMBA:
        _accel.oscillatory_transform_numba(t, w, f, om)  # compile once
        t_nb = timeit(lambda: _accel.oscillatory_transform_numba(t, w, f, om), repeat)
        print(f"  numpy {t_np * 1e3:8.2f} ms   numba {t_nb * 1e3:8.2f} ms"
              f"   speedup {t_np / t_nb:5.1f}x")
    else:
        print(f"  numpy {t_np * 1e3:8.2f} ms   (numba unavailable)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions")
    args = parser.parse_args()
    print(f"numba available: {_accel.HAS_NUMBA}   enabled: {_accel.NUMBA_ENABLED}")
    bench_bump_derivatives(args.repeat)
    bench_transform(args.repeat)


if __name__ == "__main__":
    main()
