#!/usr/bin/env python3
"""Compare the numba and numpy cosine-product kernels.

Runs both backends on the same frequency set and time grid, checks that they
agree, and prints wall times. Numba is warmed up first so compilation is not
timed.

    python benchmarks/bench_kernels.py --sites 100000 --times 1000 --threads 1,2,4
"""
import argparse
import time

import numpy as np

from spinrelax import _backend, kernels
from spinrelax.dynamics import pair_frequencies
from spinrelax.lattice import build_lattice, power_law_couplings


def synthetic_frequencies(n_sites, alpha=1.5):
    L = int(round(np.sqrt(n_sites)))
    lat = build_lattice("square", L)
    c = power_law_couplings(lat, 1.0, alpha)
    i, j = lat.center_pair()
    return pair_frequencies(c, i, j, -1)


def timed(fn, *args, repeat=1):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sites", type=int, default=100_000)
    p.add_argument("--times", type=int, default=1000)
    p.add_argument("--tmax", type=float, default=100.0)
    p.add_argument("--threads", default="1")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--skip-numpy", action="store_true")
    args = p.parse_args(argv)

    a = synthetic_frequencies(args.sites)
    ts = np.geomspace(1e-2, args.tmax, args.times)
    print(f"{a.size} factors x {ts.size} time points")
    kernels.log_cos_product_numba(a[:64], ts[:4])  # compile

    ref = None
    for n in (int(v) for v in args.threads.split(",")):
        used = _backend.set_threads(n)
        dt, res = timed(kernels.log_cos_product_numba, a, ts, repeat=args.repeat)
        ref = ref or (dt, res)
        print(f"numba  threads={used:<3d} {dt:8.3f} s   speedup vs first {ref[0] / dt:5.2f}x")
    if not args.skip_numpy:
        dt, (s_np, l_np) = timed(kernels.log_cos_product_numpy, a, ts, repeat=1)
        s_nb, l_nb = ref[1]
        print(f"numpy              {dt:8.3f} s   numba speedup {dt / ref[0]:5.2f}x")
        print(f"max |dlog| = {np.max(np.abs(l_np - l_nb)):.3e}, sign mismatches = {int(np.sum(s_np != s_nb))}")


if __name__ == "__main__":
    main()
