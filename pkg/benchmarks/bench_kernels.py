"""Benchmark the compiled kernels against their pure-Python fallbacks.

Run: python benchmarks/bench_kernels.py [--iters 2000] [--n 500]
The fallback path is the exact same code uncompiled, so the comparison
isolates the numba speedup.  To run the whole package on the fallback path
instead, set NORMRANGE_DISABLE_NUMBA=1.
"""

import argparse
import time

import numpy as np

from normrange import _kernels as k
from normrange.distributions import make_rng


def time_call(func, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--iters", type=int, default=2000, help="Gibbs iterations")
    p.add_argument("--n", type=int, default=500, help="sample size")
    p.add_argument("--draws", type=int, default=200_000,
                   help="truncated-normal fill size")
    args = p.parse_args()

    if not k.NUMBA_ENABLED:
        print("numba is disabled; nothing to compare against.")
        return

    out = np.empty(args.draws)
    fill = k._truncnorm_fill
    fill_py = k.py_func(fill)
    fill(make_rng(0), 0.0, 1.0, -0.5, 2.0, out)  # warm up compilation
    t_nb = time_call(fill, make_rng(1), 0.0, 1.0, -0.5, 2.0, out)
    t_py = time_call(fill_py, make_rng(1), 0.0, 1.0, -0.5, 2.0, out, repeat=1)
    print(f"truncnorm fill ({args.draws} draws):  "
          f"numba {t_nb*1e3:8.1f} ms  python {t_py*1e3:8.1f} ms  "
          f"speedup {t_py/t_nb:6.1f}x")

    gargs = (args.n, 0.0, -15.0, 16.0, 0.001, -15.001, 15.999,
             0.0, 1e4, 2.0, 2.0, args.iters, 0.0, 60.0, False)
    chain = k._gibbs_chain
    chain_py = k.py_func(chain)
    chain(make_rng(0), *gargs)  # warm up
    t_nb = time_call(chain, make_rng(1), *gargs)
    t_py = time_call(chain_py, make_rng(1), *gargs, repeat=1)
    print(f"gibbs chain (n={args.n}, {args.iters} iters): "
          f"numba {t_nb*1e3:8.1f} ms  python {t_py*1e3:8.1f} ms  "
          f"speedup {t_py/t_nb:6.1f}x")

    margs = (args.n, 0.001, -15.0, 16.0, 0.0, 1e4, 2.0, 2.0,
             args.iters, 0.0, 4.0, 0.2, 0.1)
    rw = k._rw_chain
    rw_py = k.py_func(rw)
    rw(make_rng(0), *margs)  # warm up
    t_nb = time_call(rw, make_rng(1), *margs)
    t_py = time_call(rw_py, make_rng(1), *margs, repeat=1)
    print(f"metropolis chain ({args.iters} iters):    "
          f"numba {t_nb*1e3:8.1f} ms  python {t_py*1e3:8.1f} ms  "
          f"speedup {t_py/t_nb:6.1f}x")


if __name__ == "__main__":
    main()
